//! Permutations of `{0, .., n-1}` enumerated by Heap's algorithm.
//!
//! The enumeration order is fixed, so every signed sum over `S_n` in this
//! crate is reproducible bit-for-bit.

/// A permutation in one-line notation with its sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedPermutation {
    pub perm: Vec<usize>,
    pub sign: i8,
}

impl SignedPermutation {
    pub fn sign_f64(&self) -> f64 {
        f64::from(self.sign)
    }
}

/// All `n!` permutations in Heap order; each step is a single transposition,
/// so the sign alternates.
pub fn permutations(n: usize) -> Vec<SignedPermutation> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::with_capacity(factorial(n) as usize);
    let mut sign = 1i8;
    out.push(SignedPermutation {
        perm: a.clone(),
        sign,
    });
    let mut c = vec![0usize; n];
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            sign = -sign;
            out.push(SignedPermutation {
                perm: a.clone(),
                sign,
            });
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Largest `n` served by [`cached`].
pub const MAX_CACHED: usize = 8;

/// Cached [`permutations`] for `n <= MAX_CACHED`; larger `n` panics.
pub fn cached(n: usize) -> &'static [SignedPermutation] {
    use std::sync::OnceLock;
    static CACHE: [OnceLock<Vec<SignedPermutation>>; MAX_CACHED + 1] =
        [const { OnceLock::new() }; MAX_CACHED + 1];
    CACHE[n].get_or_init(|| permutations(n))
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Cycle decomposition. Each cycle starts at its smallest element and
/// follows the permutation forward; cycles are listed by increasing start.
pub fn cycles(perm: &[usize]) -> Vec<Vec<usize>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            cycle.push(j);
            j = perm[j];
        }
        out.push(cycle);
    }
    out
}

/// `k`-element subsets of `{0, .., n-1}` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
