//! Brute-force oracles shared by unit tests. Deliberately naive.

/// Every permutation of 1..=n in lexicographic order.
pub fn all_perms(n: usize) -> Vec<Vec<u32>> {
    fn go(prefix: &mut Vec<u32>, used: &mut [bool], out: &mut Vec<Vec<u32>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v as u32 + 1);
                go(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Number of positions holding a value smaller than everything before it.
pub fn naive_lrm_count(pi: &[u32]) -> usize {
    (0..pi.len())
        .filter(|&i| pi[..i].iter().all(|&v| v > pi[i]))
        .count()
}
