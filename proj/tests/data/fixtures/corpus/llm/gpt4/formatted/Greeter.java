public class Greeter {
    private final String greeting;

    public Greeter(String greeting) {
        this.greeting = greeting;
    }

    public String greet(String name) {
        final String message = String.format("%s, %s!", greeting, name);
        return message;
    }
}
