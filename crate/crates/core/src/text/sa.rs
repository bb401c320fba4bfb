//! Suffix array construction by induced sorting (SA-IS).

/// Suffix array of `text` followed by a unique smallest terminator. The
/// result has `text.len() + 1` entries; the first is always `text.len()`.
pub fn suffix_array(text: &[u8]) -> Vec<usize> {
    let mut s: Vec<usize> = text.iter().map(|&b| b as usize + 1).collect();
    s.push(0);
    sais(&s, 257)
}

fn bucket_bounds(s: &[usize], k: usize, ends: bool) -> Vec<usize> {
    let mut counts = vec![0usize; k];
    for &c in s {
        counts[c] += 1;
    }
    let mut sum = 0;
    for c in counts.iter_mut() {
        sum += *c;
        *c = if ends { sum } else { sum - *c };
    }
    counts
}

// s must end with a unique 0 and use symbols < k.
fn sais(s: &[usize], k: usize) -> Vec<usize> {
    let n = s.len();
    const EMPTY: usize = usize::MAX;
    if n == 1 {
        return vec![0];
    }
    // true = S-type
    let mut stype = vec![false; n];
    stype[n - 1] = true;
    for i in (0..n - 1).rev() {
        stype[i] = s[i] < s[i + 1] || (s[i] == s[i + 1] && stype[i + 1]);
    }
    let is_lms = |i: usize| i > 0 && stype[i] && !stype[i - 1];

    let induce = |sa: &mut Vec<usize>, lms: &[usize]| {
        sa.iter_mut().for_each(|x| *x = EMPTY);
        let mut ends = bucket_bounds(s, k, true);
        for &i in lms.iter().rev() {
            ends[s[i]] -= 1;
            sa[ends[s[i]]] = i;
        }
        let mut heads = bucket_bounds(s, k, false);
        for r in 0..n {
            let j = sa[r];
            if j != EMPTY && j > 0 && !stype[j - 1] {
                sa[heads[s[j - 1]]] = j - 1;
                heads[s[j - 1]] += 1;
            }
        }
        let mut ends = bucket_bounds(s, k, true);
        for r in (0..n).rev() {
            let j = sa[r];
            if j != EMPTY && j > 0 && stype[j - 1] {
                ends[s[j - 1]] -= 1;
                sa[ends[s[j - 1]]] = j - 1;
            }
        }
    };

    let lms: Vec<usize> = (1..n).filter(|&i| is_lms(i)).collect();
    let mut sa = vec![EMPTY; n];
    induce(&mut sa, &lms);

    // Name LMS substrings in sorted order.
    let lms_equal = |a: usize, b: usize| {
        if a == n - 1 || b == n - 1 {
            return a == b;
        }
        let mut d = 0;
        loop {
            if s[a + d] != s[b + d] || stype[a + d] != stype[b + d] {
                return false;
            }
            if d > 0 && (is_lms(a + d) || is_lms(b + d)) {
                return is_lms(a + d) && is_lms(b + d);
            }
            d += 1;
        }
    };
    let mut names = vec![EMPTY; n];
    let mut name = 0;
    let mut prev = EMPTY;
    for &j in &sa {
        if is_lms(j) {
            if prev != EMPTY && !lms_equal(prev, j) {
                name += 1;
            }
            names[j] = name;
            prev = j;
        }
    }
    let reduced: Vec<usize> = lms.iter().map(|&i| names[i]).collect();

    let sorted_lms: Vec<usize> = if name + 1 == reduced.len() {
        let mut order = vec![0; reduced.len()];
        for (i, &c) in reduced.iter().enumerate() {
            order[c] = lms[i];
        }
        order
    } else {
        sais(&reduced, name + 1).into_iter().map(|i| lms[i]).collect()
    };
    induce(&mut sa, &sorted_lms);
    sa
}
