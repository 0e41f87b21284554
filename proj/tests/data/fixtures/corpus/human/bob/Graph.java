import java.util.ArrayList;
import java.util.List;

public class Graph {
  private final List<List<Integer>> adj = new ArrayList<>();

  public Graph(int n) {
    for (int i = 0; i < n; i++) adj.add(new ArrayList<>());
  }

  public void edge(int u, int v) {
    adj.get(u).add(v);
    adj.get(v).add(u);
  }

  public int[] bfs(int s) {
    int[] dist = new int[adj.size()];
    java.util.Arrays.fill(dist, -1);
    java.util.ArrayDeque<Integer> q = new java.util.ArrayDeque<>();
    dist[s] = 0;
    q.add(s);
    while (!q.isEmpty()) {
      int u = q.poll();
      for (int v : adj.get(u)) {
        if (dist[v] < 0) {
          dist[v] = dist[u] + 1;
          q.add(v);
        }
      }
    }
    return dist;
  }
}
