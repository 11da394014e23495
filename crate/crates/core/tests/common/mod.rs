//! Brute-force reference implementations shared by the integration tests.
//! None of these call into the library's counting or ranking code.
#![allow(dead_code)]

/// All permutations of `1..=n` in lexicographic order, by recursive insertion.
pub fn lex_permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        let n = used.len();
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for s in 0..n {
            if !used[s] {
                used[s] = true;
                prefix.push(s + 1);
                rec(prefix, used, out);
                prefix.pop();
                used[s] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Rank of each entry: 1 + number of entries that are smaller, or equal and earlier.
pub fn naive_pattern(x: &[f64]) -> Vec<usize> {
    (0..x.len())
        .map(|i| {
            1 + (0..x.len())
                .filter(|&j| x[j] < x[i] || (x[j] == x[i] && j < i))
                .count()
        })
        .collect()
}

/// Pattern counts by explicit double loop over start positions and lookup in
/// the enumerated permutation list.
pub fn naive_counts(x: &[f64], n: usize, tau: usize) -> Vec<u64> {
    let perms = lex_permutations(n);
    let mut counts = vec![0u64; perms.len()];
    let span = (n - 1) * tau;
    let mut k = 0;
    while k + span < x.len() {
        let mut sub = Vec::with_capacity(n);
        for j in 0..n {
            sub.push(x[k + j * tau]);
        }
        let p = naive_pattern(&sub);
        let idx = perms.iter().position(|q| *q == p).unwrap();
        counts[idx] += 1;
        k += 1;
    }
    counts
}

/// Direct O(L^2) DFT magnitude, bins `0..=L/2`.
pub fn naive_dft_magnitudes(x: &[f64]) -> Vec<f64> {
    let l = x.len();
    (0..=l / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (i, &v) in x.iter().enumerate() {
                let ang = -std::f64::consts::TAU * (k * i) as f64 / l as f64;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            (re * re + im * im).sqrt()
        })
        .collect()
}

/// Minimal xorshift generator so test inputs do not depend on the library's RNG.
pub struct XorShift(pub u64);

impl XorShift {
    pub fn next_u64(&mut self) -> u64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        x
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}
