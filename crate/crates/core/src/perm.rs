//! Permutation enumeration helpers used by verification sweeps and the
//! Weyl-group searches.

/// All permutations of 0..n in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for p in &out {
            for i in 0..n {
                if !p.contains(&i) {
                    let mut np = p.clone();
                    np.push(i);
                    next.push(np);
                }
            }
        }
        out = next;
    }
    out
}

/// Signature of a permutation given as an image list.
pub fn perm_sign(p: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// The k-th permutation of 0..n in lexicographic order (factorial unranking).
pub fn unrank(n: usize, mut k: usize) -> Vec<usize> {
    let mut avail: Vec<usize> = (0..n).collect();
    let mut fact = 1usize;
    for i in 1..n {
        fact *= i;
    }
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let idx = k / fact;
        k %= fact;
        out.push(avail.remove(idx));
        if i > 0 {
            fact /= i;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_and_unranking_agree() {
        let all = permutations(4);
        assert_eq!(all.len(), 24);
        for (k, p) in all.iter().enumerate() {
            assert_eq!(&unrank(4, k), p);
        }
    }

    #[test]
    fn signs() {
        assert_eq!(perm_sign(&[0, 1, 2]), 1);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[2, 0, 1]), 1);
    }
}
