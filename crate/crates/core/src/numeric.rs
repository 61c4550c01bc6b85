//! Small numeric helpers: compensated summation, binomial coefficients,
//! tuple enumeration, and the counter-based bit mixer used for seeding.

/// Neumaier variant of Kahan summation. Sign-mixed sums over many
/// combinatorial terms otherwise lose digits.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Exact binomial coefficient in integer arithmetic.
///
/// Intermediate products stay within `u128` for every (n, k) this crate
/// enumerates (n up to ~10^4, k up to 8).
pub fn binomial_u128(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 1..=k {
        c = c * (n - k + i) as u128 / i as u128;
    }
    c
}

pub fn binomial(n: u64, k: u64) -> f64 {
    binomial_u128(n, k) as f64
}

/// Visits every strictly increasing k-tuple from {0, .., n-1} in
/// lexicographic order. Returns the number of tuples visited.
pub fn for_each_combination<F: FnMut(&[usize])>(n: usize, k: usize, mut f: F) -> u128 {
    if k > n {
        return 0;
    }
    if k == 0 {
        f(&[]);
        return 1;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    let mut count: u128 = 0;
    loop {
        f(&idx);
        count += 1;
        // advance to the next combination
        let mut i = k;
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return count;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Visits every element of {0, .., base-1}^len as a digit vector,
/// least-significant digit last, in lexicographic order.
pub fn for_each_product<F: FnMut(&[usize])>(base: usize, len: usize, mut f: F) -> u128 {
    let mut digits = vec![0usize; len];
    let mut count: u128 = 0;
    loop {
        f(&digits);
        count += 1;
        let mut i = len;
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < base {
                break;
            }
            digits[i] = 0;
            if i == 0 {
                return count;
            }
        }
    }
}

/// Visits every permutation of {0, .., k-1} (Heap's algorithm). Only used
/// for the exhaustive symmetry checks, so k stays tiny.
pub fn for_each_permutation<F: FnMut(&[usize])>(k: usize, mut f: F) {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut c = vec![0usize; k];
    f(&perm);
    let mut i = 0;
    while i < k {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            f(&perm);
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

/// 64-bit finalizer (the SplitMix64 mixing step). Statistically strong
/// enough for inverse-CDF sampling; chosen over an external RNG so the
/// stream is bit-identical across platforms and worker counts.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// i-th element of the counter-based stream for `seed`.
pub fn stream_u64(seed: u64, i: u64) -> u64 {
    mix64(seed ^ mix64(i.wrapping_mul(0xD1B5_4A32_D192_ED03)))
}

/// Uniform in [0, 1) from the top 53 bits.
pub fn stream_u01(seed: u64, i: u64) -> f64 {
    (stream_u64(seed, i) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed for replication j of sample size n, derived from the master seed.
/// Pure function of its inputs, so any scheduling of replications across
/// workers reproduces the same draws.
pub fn derive_seed(master: u64, n: u64, j: u64) -> u64 {
    mix64(mix64(master ^ mix64(n)) ^ mix64(j ^ 0xA076_1D64_78BD_642F))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn neumaier_recovers_lost_bits() {
        let mut s = NeumaierSum::new();
        for x in [1e16, 1.0, -1e16] {
            s.add(x);
        }
        assert_eq!(s.total(), 1.0);
    }

    #[test]
    fn binomial_small_values() {
        assert_eq!(binomial_u128(5, 2), 10);
        assert_eq!(binomial_u128(10, 0), 1);
        assert_eq!(binomial_u128(10, 10), 1);
        assert_eq!(binomial_u128(4, 7), 0);
        assert_eq!(binomial_u128(50, 3), 19600);
    }

    #[test]
    fn combination_count_matches_binomial() {
        for n in 0..=9 {
            for k in 0..=n {
                let visited = for_each_combination(n, k, |_| {});
                assert_eq!(visited, binomial_u128(n as u64, k as u64));
            }
        }
    }

    #[test]
    fn combinations_are_lexicographic_and_increasing() {
        let mut seen = Vec::new();
        for_each_combination(5, 3, |c| seen.push(c.to_vec()));
        for c in &seen {
            assert!(c.windows(2).all(|w| w[0] < w[1]));
        }
        let mut sorted = seen.clone();
        sorted.sort();
        assert_eq!(seen, sorted);
    }

    #[test]
    fn product_enumeration_count() {
        assert_eq!(for_each_product(3, 4, |_| {}), 81);
        assert_eq!(for_each_product(2, 0, |_| {}), 1);
    }

    #[test]
    fn permutation_count() {
        let mut count = 0;
        for_each_permutation(4, |_| count += 1);
        assert_eq!(count, 24);
    }

    #[test]
    fn stream_is_deterministic_and_in_unit_interval() {
        for i in 0..1000 {
            let u = stream_u01(42, i);
            assert!((0.0..1.0).contains(&u));
            assert_eq!(stream_u64(42, i), stream_u64(42, i));
        }
        assert_ne!(stream_u64(42, 0), stream_u64(43, 0));
    }

    #[test]
    fn stream_mean_is_roughly_half() {
        let n = 100_000;
        let mean: f64 = (0..n).map(|i| stream_u01(7, i)).sum::<f64>() / n as f64;
        assert!((mean - 0.5).abs() < 0.005, "mean {mean}");
    }
}
