//! Test-only reference implementations, deliberately independent of the
//! library's evaluation path: the d-matrix comes from the textbook
//! factorial sum (exact in f64 up to N = 8) and correlations from a dense
//! tensor-product expectation on the explicit singlet vector.

/// d^s_{m',m}(theta) via the factorial sum; rows/columns ascending in m.
/// Safe for two_s <= 14 where every factorial is exact in f64.
pub fn reference_wigner_d(two_s: u32, theta: f64) -> Vec<Vec<f64>> {
    assert!(two_s <= 14, "factorial formula oracle capped at N = 15");
    let n = two_s as usize + 1;
    let fact = |k: i64| -> f64 {
        assert!(k >= 0);
        (2..=k).map(|x| x as f64).product()
    };
    let (half_sin, half_cos) = (theta / 2.0).sin_cos();
    let mut d = vec![vec![0.0; n]; n];
    for (r, row) in d.iter_mut().enumerate() {
        for (c, out) in row.iter_mut().enumerate() {
            let jpm = c as i64; // j + m
            let jmm = two_s as i64 - c as i64; // j - m
            let jpmp = r as i64; // j + m'
            let jmmp = two_s as i64 - r as i64; // j - m'
            let diff = jpmp - jpm; // m' - m
            let prefactor = (fact(jpmp) * fact(jmmp) * fact(jpm) * fact(jmm)).sqrt();
            let mut sum = 0.0;
            for k in 0.max(-diff)..=jpm.min(jmmp) {
                let sign = if (diff + k) % 2 == 0 { 1.0 } else { -1.0 };
                let denom = fact(jpm - k) * fact(k) * fact(diff + k) * fact(jmmp - k);
                sum += sign
                    * half_cos.powi((jpm + jmmp - 2 * k) as i32)
                    * half_sin.powi((diff + 2 * k) as i32)
                    / denom;
            }
            *out = prefactor * sum;
        }
    }
    d
}

/// <Psi| O(z-axis) x O(theta-axis) |Psi> on the explicit N^2 singlet
/// vector, with the rotated side conjugated by the reference d-matrix.
pub fn singlet_expectation(two_s: u32, p: u64, theta: f64) -> f64 {
    let n = two_s as usize + 1;
    let signs: Vec<f64> = (0..n)
        .map(|r| if (p >> r) & 1 == 1 { -1.0 } else { 1.0 })
        .collect();
    let d = reference_wigner_d(two_s, theta);
    // O_B = d diag(signs) d^T
    let mut ob = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            ob[i][j] = (0..n).map(|k| d[i][k] * signs[k] * d[j][k]).sum();
        }
    }
    // |Psi> = (1/sqrt N) sum_m (-1)^(s-m) |m, -m>; row r holds m = r - s
    let mut psi = vec![0.0; n * n];
    let norm = 1.0 / (n as f64).sqrt();
    for r in 0..n {
        let phase = if (two_s as usize - r).is_multiple_of(2) {
            1.0
        } else {
            -1.0
        };
        psi[r * n + (n - 1 - r)] = phase * norm;
    }
    // (O_A x O_B) |Psi>, O_A diagonal
    let mut out = vec![0.0; n * n];
    for i1 in 0..n {
        for i2 in 0..n {
            let acc: f64 = (0..n).map(|j2| ob[i2][j2] * psi[i1 * n + j2]).sum();
            out[i1 * n + i2] = signs[i1] * acc;
        }
    }
    psi.iter().zip(&out).map(|(a, b)| a * b).sum()
}

/// Deterministic keyed generator for reproducible "random" test angles.
pub fn keyed_random_f64(seed: u64, index: u64) -> f64 {
    let mut z = seed
        ^ index
            .wrapping_mul(0x9E3779B97F4A7C15)
            .wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^= z >> 31;
    (z >> 11) as f64 / (1u64 << 53) as f64
}
