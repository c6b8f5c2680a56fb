#![allow(dead_code)]

use lamlab::symdyn::Address313;
use lamlab::{qml, Angle, Leaf};
use num_bigint::BigUint;
use rand::rngs::StdRng;
use rand::Rng;

/// Weighted count of cyclic words `i_0 .. i_{n-1}` with every transition
/// `i_k -> i_{k+1 mod n}` allowed, weight the product of the entries.
pub fn brute_words(rows: &[Vec<u64>], n: u32) -> BigUint {
    let k = rows.len();
    let mut total = BigUint::from(0u8);
    let mut word = vec![0usize; n as usize];
    loop {
        let mut w = BigUint::from(1u8);
        for t in 0..n as usize {
            w *= rows[word[t]][word[(t + 1) % n as usize]];
        }
        total += w;
        let mut i = 0;
        loop {
            if i == n as usize {
                return total;
            }
            word[i] += 1;
            if word[i] < k {
                break;
            }
            word[i] = 0;
            i += 1;
        }
    }
}

/// Words whose least period is exactly `n`.
pub fn brute_exact(rows: &[Vec<u64>], n: u32) -> BigUint {
    let k = rows.len();
    let mut total = BigUint::from(0u8);
    let count = (k as u64).pow(n);
    for code in 0..count {
        let mut c = code;
        let word: Vec<usize> = (0..n)
            .map(|_| {
                let s = (c % k as u64) as usize;
                c /= k as u64;
                s
            })
            .collect();
        let least = (1..=n)
            .find(|&d| n.is_multiple_of(d) && (0..n as usize).all(|i| word[i] == word[(i + d as usize) % n as usize]))
            .unwrap();
        if least != n {
            continue;
        }
        let mut w = BigUint::from(1u8);
        for t in 0..n as usize {
            w *= rows[word[t]][word[(t + 1) % n as usize]];
        }
        total += w;
    }
    total
}

/// Block substitution by brute force over every lower-period minor.
pub fn tuning_oracle(x: &Angle) -> Option<(Leaf, u32)> {
    let k = x.period() as u32;
    let block = qml::binary_block(x).unwrap();
    for k2 in 2..k {
        if !k.is_multiple_of(k2) {
            continue;
        }
        for m in qml::pairing_of_period(k2).unwrap() {
            if m.period != k2 {
                continue;
            }
            let lo = qml::binary_block(m.leaf.lo()).unwrap();
            let hi = qml::binary_block(m.leaf.hi()).unwrap();
            let ok = block
                .as_bytes()
                .chunks(k2 as usize)
                .all(|c| c == lo.as_bytes() || c == hi.as_bytes());
            if ok {
                return Some((m.leaf, k / k2));
            }
        }
    }
    None
}

/// Draws an address meeting the input constraints: `j_1 > 3 i_1` and each
/// `m_{i+1}` above the alternating sum.
pub fn random_313(rng: &mut StdRng, regime: usize) -> Address313 {
    let (m_hi, j_hi, slack, terms) = [(6u64, 3u64, 3u64, 4usize), (40, 6, 50, 6), (500, 12, 5000, 9)][regime];
    let m = rng.gen_range(1..=m_hi);
    let i1 = rng.gen_range(1..=3);
    let n = rng.gen_range(2..=terms);
    let mut j = vec![rng.gen_range(3 * i1 + 1..=3 * i1 + j_hi)];
    let mut m_seq = vec![m];
    for i in 1..n {
        let alt: u64 = (0..i).rev().step_by(2).map(|l| j[l] * m_seq[l]).sum();
        m_seq.push(alt + 1 + rng.gen_range(0..=slack));
        j.push(rng.gen_range(1..=j_hi));
    }
    Address313 { m, i1, j, m_seq }
}
