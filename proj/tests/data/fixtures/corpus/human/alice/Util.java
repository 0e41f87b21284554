package fixtures;

class Util {
	static final String BANNER = """
		multi
		line
		""";

	static int gcd(int a, int b) {
		return b == 0 ? a : gcd(b, a % b);
	}

	static long pow(long base, int exp) {
		long result = 1;
		while (exp > 0) {
			if ((exp & 1) == 1) result *= base;
			base *= base;
			exp >>= 1;
		}
		return result;
	}
}
