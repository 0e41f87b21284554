import java.util.Arrays;
import java.util.Scanner;

public class Sorter {

    /**
     * Sorts the given array in ascending order using insertion sort.
     *
     * @param values the array to sort
     */
    public static void sort(int[] values) {
        int index = 1;
        while (index < values.length) {
            int current = values[index];
            int position = index - 1;
            while (position >= 0 && values[position] > current) {
                values[position + 1] = values[position];
                position -= 1;
            }
            values[position + 1] = current;
            index += 1;
        }
    }

    public static void main(String[] args) {
        try (Scanner scanner = new Scanner(System.in)) {
            int count = scanner.nextInt();
            int[] values = new int[count];
            for (int i = 0; i < count; i++) {
                values[i] = scanner.nextInt();
            }
            sort(values);
            System.out.println(Arrays.toString(values));
        }
    }
}
