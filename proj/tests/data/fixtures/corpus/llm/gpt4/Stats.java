import java.util.List;
import java.util.stream.Collectors;

public class Stats {

    public static double mean(List<Double> values) {
        return values.stream()
                .mapToDouble(Double::doubleValue)
                .average()
                .orElse(0.0);
    }

    public static List<String> labels(List<Integer> values) {
        return values.stream()
                .map(value -> value % 2 == 0 ? "even" : "odd")
                .collect(Collectors.toList());
    }

    public static String describe(int value) {
        switch (value) {
            case 0:
                return "zero";
            case 1:
                return "one";
            default:
                return "many";
        }
    }
}
