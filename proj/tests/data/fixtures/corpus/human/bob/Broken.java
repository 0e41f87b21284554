public class Broken {
  void m( {
    int = ;
  }
