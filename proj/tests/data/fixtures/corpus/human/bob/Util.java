import java.io.*;

public class Util {
  private static final int MAX_SIZE = 1_000;

  public static String read(BufferedReader br) throws IOException {
    String line = br.readLine();
    if (line == null) {
      throw new EOFException("no input");
    }
    return line.trim();
  }

  public static int sum(int[] xs) {
    int total = 0;
    for (int x : xs) {
      total += x;
    }
    return total;
  }
}
