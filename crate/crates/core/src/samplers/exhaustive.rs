use crate::error::{Error, Result};
use crate::fixed_point::BitVector;
use crate::qubo::Qubo;

use super::SampleSet;

/// Largest variable count accepted by exhaustive enumeration.
pub const EXHAUSTIVE_CAP: usize = 26;

// Local fields are recomputed from scratch this often during the Gray-code
// walk so rounding drift stays far below the candidate tolerance.
const RESYNC_INTERVAL: u64 = 1 << 16;

fn check_cap(qubo: &Qubo) -> Result<()> {
    if qubo.num_vars() > EXHAUSTIVE_CAP {
        return Err(Error::Capacity {
            vars: qubo.num_vars(),
            cap: EXHAUSTIVE_CAP,
        });
    }
    Ok(())
}

/// Every one of the `2^M` states, once each, sorted by energy.
pub fn sample_exhaustive(qubo: &Qubo) -> Result<SampleSet> {
    check_cap(qubo)?;
    let m = qubo.num_vars();
    let total = 1u64 << m;
    // Code bit (m-1-j) is variable j, so code order is lexicographic order.
    let shift = 64 - m as u32;
    // Walk codes in increasing order. Between consecutive codes only the
    // trailing bits change, i.e. the highest-indexed variables, so the
    // partial energies of the unchanged prefix are reused. The arithmetic is
    // exactly that of `energy_by`.
    let mut partial = vec![0.0; m + 1];
    let mut first_changed = 0;
    let mut rows: Vec<(u64, u64)> = Vec::with_capacity(total as usize);
    for code in 0..total {
        let is_set = |j: usize| code >> (m - 1 - j) & 1 == 1;
        for j in first_changed..m {
            partial[j + 1] = qubo.accumulate(partial[j], j, is_set);
        }
        rows.push((order_key(partial[m]), code));
        first_changed = m.saturating_sub(1 + code.trailing_ones() as usize);
    }
    rows.sort_unstable();

    let mut set = SampleSet::empty(m);
    set.states.reserve_exact(rows.len());
    set.energies.reserve_exact(rows.len());
    for (key, code) in rows {
        set.states.push(if m == 0 { 0 } else { code << shift });
        set.energies.push(from_order_key(key));
    }
    set.occurrences = vec![1; set.energies.len()];
    set.num_reads = total;
    Ok(set)
}

// Unsigned integer whose order is `f64::total_cmp` order; integer keys
// sort considerably faster than float comparisons.
fn order_key(x: f64) -> u64 {
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | 1 << 63
    }
}

fn from_order_key(key: u64) -> f64 {
    f64::from_bits(if key >> 63 == 1 {
        key & !(1 << 63)
    } else {
        !key
    })
}

/// Global minimizers of a QUBO.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStates {
    pub energy: f64,
    /// Every state attaining `energy` exactly, in lexicographic order.
    pub states: Vec<BitVector>,
}

/// Find the exact ground states without materializing the state space.
///
/// Walks all states in Gray-code order, updating the energy and the local
/// fields `v_k + sum_j w_kj q_j` of neighbours in `O(degree)` per flip.
/// States within a small tolerance of the running minimum are kept and
/// re-evaluated exactly at the end, so the result agrees bit-for-bit with
/// the first entries of [`sample_exhaustive`].
pub fn ground_states(qubo: &Qubo) -> Result<GroundStates> {
    check_cap(qubo)?;
    let m = qubo.num_vars();
    let tol = 1e-9 * (1.0 + qubo.max_abs_coefficient() * m as f64);

    // Variable v lives at bit v of `state` here.
    let fields_of = |state: u64| -> Vec<f64> {
        (0..m)
            .map(|k| {
                qubo.linear()[k]
                    + qubo
                        .neighbors(k)
                        .iter()
                        .filter(|&&(j, _)| state >> j & 1 == 1)
                        .map(|&(_, w)| w)
                        .sum::<f64>()
            })
            .collect()
    };
    let exact = |state: u64| qubo.energy_by(|j| state >> j & 1 == 1);

    let mut state = 0u64;
    let mut energy = 0.0;
    let mut fields = fields_of(state);
    let mut best = 0.0;
    let mut candidates = vec![0u64];

    for step in 1..(1u64 << m) {
        let k = step.trailing_zeros() as usize;
        let was_set = state >> k & 1 == 1;
        energy += if was_set { -fields[k] } else { fields[k] };
        state ^= 1 << k;
        for &(j, w) in qubo.neighbors(k) {
            fields[j] += if was_set { -w } else { w };
        }
        if step % RESYNC_INTERVAL == 0 {
            fields = fields_of(state);
            energy = exact(state);
        }

        if energy < best - tol {
            best = energy;
            candidates.clear();
            candidates.push(state);
        } else if energy <= best + tol {
            if energy < best {
                best = energy;
            }
            candidates.push(state);
        }
    }

    let scored: Vec<(f64, u64)> = candidates.into_iter().map(|s| (exact(s), s)).collect();
    let min = scored
        .iter()
        .map(|&(e, _)| e)
        .min_by(f64::total_cmp)
        .unwrap_or(0.0);
    let mut states: Vec<BitVector> = scored
        .into_iter()
        .filter(|&(e, _)| e.to_bits() == min.to_bits())
        .map(|(_, s)| BitVector::new((0..m).map(|j| (s >> j & 1) as u8).collect()).expect("binary"))
        .collect();
    states.sort();
    Ok(GroundStates {
        energy: min,
        states,
    })
}
