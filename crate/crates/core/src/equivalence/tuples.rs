//! Injective tuples over a carrier `0..n`, enumerated in lexicographic
//! order and ranked by position in that order.

/// Number of injective tuples of length `k` over `n` points.
pub fn count(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    ((n - k + 1)..=n).map(|v| v as u128).product()
}

/// Number of injective tuples of every length `0..=k_max`.
pub fn count_up_to(n: usize, k_max: usize) -> u128 {
    (0..=k_max.min(n)).map(|k| count(n, k)).sum()
}

pub fn enumerate(n: usize, k: usize) -> Vec<Vec<u8>> {
    fn go(n: usize, k: usize, cur: &mut Vec<u8>, used: &mut [bool], out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v as u8);
                go(n, k, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::with_capacity(count(n, k) as usize);
    if k <= n {
        go(n, k, &mut Vec::with_capacity(k), &mut vec![false; n], &mut out);
    }
    out
}

/// Position of an injective tuple among all injective tuples of its length.
pub fn rank<T: Copy + Into<usize>>(n: usize, t: &[T]) -> usize {
    let mut used = vec![false; n];
    let mut r = 0usize;
    for (i, &v) in t.iter().enumerate() {
        let v: usize = v.into();
        let smaller_unused = (0..v).filter(|&u| !used[u]).count();
        r = r * (n - i) + smaller_unused;
        used[v] = true;
    }
    r
}
