use crate::error::{Error, Result};

/// Largest moment order the enumeration accepts.
pub const MAX_ORDER: usize = 12;

/// Counts of pair partitions of `{1..order}` by number of crossings:
/// entry `k` is the number of pairings with exactly `k` crossings.
/// Odd orders give the zero polynomial.
pub fn pair_partition_polynomial(order: usize) -> Result<Vec<u64>> {
    if order > MAX_ORDER {
        return Err(Error::Config(format!("moment order {order} exceeds {MAX_ORDER}")));
    }
    if order % 2 == 1 {
        return Ok(vec![0]);
    }
    let mut counts = vec![0u64; 1];
    let mut partner = vec![usize::MAX; order];
    enumerate(&mut partner, &mut counts);
    Ok(counts)
}

/// `<Omega, X^order Omega>_q = sum over pairings of q^{crossings}`.
pub fn moment_pair_partitions(order: usize, q: f64) -> Result<f64> {
    let coeffs = pair_partition_polynomial(order)?;
    Ok(coeffs.iter().rev().fold(0.0, |acc, &c| acc * q + c as f64))
}

fn enumerate(partner: &mut [usize], counts: &mut Vec<u64>) {
    let Some(first) = partner.iter().position(|&p| p == usize::MAX) else {
        let k = crossings(partner);
        if counts.len() <= k {
            counts.resize(k + 1, 0);
        }
        counts[k] += 1;
        return;
    };
    for second in first + 1..partner.len() {
        if partner[second] == usize::MAX {
            partner[first] = second;
            partner[second] = first;
            enumerate(partner, counts);
            partner[first] = usize::MAX;
            partner[second] = usize::MAX;
        }
    }
}

fn crossings(partner: &[usize]) -> usize {
    let pairs: Vec<(usize, usize)> = partner
        .iter()
        .enumerate()
        .filter(|&(i, &j)| i < j)
        .map(|(i, &j)| (i, j))
        .collect();
    let mut total = 0;
    for (x, &(a, b)) in pairs.iter().enumerate() {
        for &(c, d) in &pairs[x + 1..] {
            if (a < c && c < b && b < d) || (c < a && a < d && d < b) {
                total += 1;
            }
        }
    }
    total
}
