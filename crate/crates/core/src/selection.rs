//! Collapsing a sample set into one real-valued solution.

use std::fmt;
use std::str::FromStr;

use crate::channel_flow::{FlowParams, SolutionProfile};
use crate::error::{Error, Result};
use crate::fixed_point::FixedPointFormat;
use crate::samplers::SampleSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Strategy {
    /// Decode the minimum-energy state.
    LowestEnergy,
    /// Average over distinct states, ignoring how often each occurred.
    UnweightedMean,
    /// Average over reads, i.e. weighted by occurrence count.
    WeightedMean,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [
        Strategy::LowestEnergy,
        Strategy::UnweightedMean,
        Strategy::WeightedMean,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::LowestEnergy => "lowest",
            Strategy::UnweightedMean => "mean",
            Strategy::WeightedMean => "wmean",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lowest" => Ok(Strategy::LowestEnergy),
            "mean" => Ok(Strategy::UnweightedMean),
            "wmean" => Ok(Strategy::WeightedMean),
            other => Err(Error::Parse(format!(
                "unknown strategy {other:?}; expected lowest, mean or wmean"
            ))),
        }
    }
}

fn check_shape(samples: &SampleSet, fmt: &FixedPointFormat, count: usize) -> Result<()> {
    if samples.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if samples.num_vars() != count * fmt.precision() {
        return Err(Error::Length {
            expected: count * fmt.precision(),
            found: samples.num_vars(),
        });
    }
    Ok(())
}

/// Real values of `count` variables selected from `samples`.
///
/// The mean strategies average the bit vectors first and decode once;
/// decoding is linear so this equals averaging decoded values.
pub fn select(
    samples: &SampleSet,
    strategy: Strategy,
    fmt: &FixedPointFormat,
    count: usize,
) -> Result<Vec<f64>> {
    check_shape(samples, fmt, count)?;
    let m = samples.num_vars();
    let averaged: Vec<f64> = match strategy {
        Strategy::LowestEnergy => {
            let best = samples.lowest().ok_or(Error::EmptySampleSet)?;
            (0..m)
                .map(|j| if best.bit(j) { 1.0 } else { 0.0 })
                .collect()
        }
        Strategy::UnweightedMean | Strategy::WeightedMean => {
            let weighted = strategy == Strategy::WeightedMean;
            let mut tally = vec![0u64; m];
            for s in samples.iter() {
                let w = if weighted { s.occurrences } else { 1 };
                for (j, t) in tally.iter_mut().enumerate() {
                    if s.bit(j) {
                        *t += w;
                    }
                }
            }
            let total = if weighted {
                samples.num_reads()
            } else {
                samples.len() as u64
            } as f64;
            tally.into_iter().map(|t| t as f64 / total).collect()
        }
    };
    fmt.decode_fractional(&averaged, count)
}

/// Same result as [`select`], computed by decoding every state and then
/// averaging the real vectors.
pub fn select_decoded(
    samples: &SampleSet,
    strategy: Strategy,
    fmt: &FixedPointFormat,
    count: usize,
) -> Result<Vec<f64>> {
    check_shape(samples, fmt, count)?;
    if strategy == Strategy::LowestEnergy {
        let best = samples.lowest().ok_or(Error::EmptySampleSet)?;
        return fmt.decode_vector(&best.to_bitvector(), count);
    }
    let weighted = strategy == Strategy::WeightedMean;
    let mut sum = vec![0.0; count];
    for s in samples.iter() {
        let w = if weighted { s.occurrences as f64 } else { 1.0 };
        let values = fmt.decode_vector(&s.to_bitvector(), count)?;
        for (acc, v) in sum.iter_mut().zip(values) {
            *acc += w * v;
        }
    }
    let total = if weighted {
        samples.num_reads() as f64
    } else {
        samples.len() as f64
    };
    Ok(sum.into_iter().map(|x| x / total).collect())
}

/// Select interior values and reattach the zero wall values.
pub fn select_profile(
    samples: &SampleSet,
    strategy: Strategy,
    fmt: &FixedPointFormat,
    params: &FlowParams,
) -> Result<SolutionProfile> {
    let interior = select(samples, strategy, fmt, params.interior_points())?;
    Ok(SolutionProfile::from_interior(&interior, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixed_point::BitVector;
    use crate::qubo::Qubo;
    use proptest::prelude::{prop_assert, prop_assert_eq, prop_assume, proptest};
    use std::collections::BTreeMap;

    fn flat_qubo(m: usize) -> Qubo {
        Qubo::new(
            (0..m).map(|j| j as f64 * 0.1 - 0.2).collect(),
            BTreeMap::new(),
            0.0,
        )
        .unwrap()
    }

    fn set(m: usize, states: &[(&str, u64)]) -> SampleSet {
        SampleSet::from_states(
            &flat_qubo(m),
            states
                .iter()
                .map(|&(s, c)| (s.parse::<BitVector>().unwrap(), c)),
        )
        .unwrap()
    }

    fn fmt2() -> FixedPointFormat {
        FixedPointFormat::new(2, 1).unwrap()
    }

    #[test]
    fn strategy_names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert!("median".parse::<Strategy>().is_err());
    }

    #[test]
    fn single_entry_strategies_coincide() {
        let s = set(4, &[("1001", 7)]);
        let expected = vec![1.0, 0.5];
        for strategy in Strategy::ALL {
            assert_eq!(select(&s, strategy, &fmt2(), 2).unwrap(), expected);
        }
    }

    #[test]
    fn weighted_and_unweighted_means() {
        let s = set(2, &[("10", 3), ("01", 1)]);
        assert_eq!(
            select(&s, Strategy::UnweightedMean, &fmt2(), 1).unwrap(),
            vec![0.75]
        );
        assert_eq!(
            select(&s, Strategy::WeightedMean, &fmt2(), 1).unwrap(),
            vec![0.875]
        );
    }

    #[test]
    fn dominant_zero_state_pulls_weighted_mean_down() {
        let s = set(2, &[("00", 9999), ("11", 1)]);
        let w = select(&s, Strategy::WeightedMean, &fmt2(), 1).unwrap()[0];
        let u = select(&s, Strategy::UnweightedMean, &fmt2(), 1).unwrap()[0];
        assert!((w - 0.00015).abs() < 1e-15);
        assert_eq!(u, 0.75);
    }

    #[test]
    fn lowest_energy_follows_sample_order() {
        // linear weights -0.2, -0.1, 0.0, 0.1: state 1000 is lowest
        let s = set(4, &[("0001", 5), ("1000", 1), ("0100", 9)]);
        assert_eq!(
            select(&s, Strategy::LowestEnergy, &fmt2(), 2).unwrap(),
            vec![1.0, 0.0]
        );
    }

    #[test]
    fn errors_on_empty_or_mismatched() {
        let empty = SampleSet::empty(2);
        assert!(matches!(
            select(&empty, Strategy::WeightedMean, &fmt2(), 1),
            Err(Error::EmptySampleSet)
        ));
        let s = set(4, &[("1001", 1)]);
        assert!(matches!(
            select(&s, Strategy::LowestEnergy, &fmt2(), 1),
            Err(Error::Length { .. })
        ));
    }

    #[test]
    fn profile_has_zero_walls() {
        let params = FlowParams::default().with_grid_points(4);
        let s = set(4, &[("1111", 2), ("0110", 3)]);
        for strategy in Strategy::ALL {
            let p = select_profile(&s, strategy, &fmt2(), &params).unwrap();
            assert_eq!(p.values.len(), 4);
            assert_eq!(p.values[0], 0.0);
            assert_eq!(p.values[3], 0.0);
            assert!(p.interior().iter().all(|&v| (0.0..=1.5).contains(&v)));
        }
    }

    fn arbitrary_set() -> impl proptest::strategy::Strategy<Value = Vec<(Vec<u8>, u64)>> {
        proptest::collection::vec((proptest::collection::vec(0u8..=1, 6), 1u64..50), 1..12)
    }

    proptest! {
        #[test]
        fn both_routes_agree(raw in arbitrary_set()) {
            let q = flat_qubo(6);
            let s = SampleSet::from_states(
                &q,
                raw.into_iter().map(|(b, c)| (BitVector::new(b).unwrap(), c)),
            ).unwrap();
            let f = FixedPointFormat::new(3, 1).unwrap();
            for strategy in Strategy::ALL {
                let a = select(&s, strategy, &f, 2).unwrap();
                let b = select_decoded(&s, strategy, &f, 2).unwrap();
                for (x, y) in a.iter().zip(&b) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn equal_occurrences_make_means_equal(raw in arbitrary_set(), occ in 1u64..20) {
            let q = flat_qubo(6);
            let s = SampleSet::from_states(
                &q,
                raw.into_iter().map(|(b, _)| (BitVector::new(b).unwrap(), occ)),
            ).unwrap();
            // duplicates in `raw` merge into larger counts; keep only uniform sets
            prop_assume!(s.iter().all(|e| e.occurrences == occ));
            let f = FixedPointFormat::new(2, 1).unwrap();
            prop_assert_eq!(
                select(&s, Strategy::WeightedMean, &f, 3).unwrap(),
                select(&s, Strategy::UnweightedMean, &f, 3).unwrap()
            );
        }

        #[test]
        fn splitting_an_entry_keeps_weighted_mean(raw in arbitrary_set(), cut in 0usize..12) {
            let q = flat_qubo(6);
            let whole: Vec<(BitVector, u64)> = raw
                .iter()
                .map(|(b, c)| (BitVector::new(b.clone()).unwrap(), *c + 1))
                .collect();
            let mut split = whole.clone();
            let i = cut % split.len();
            let (state, count) = split[i].clone();
            split[i].1 = 1;
            split.push((state, count - 1));
            let a = SampleSet::from_states(&q, whole).unwrap();
            let b = SampleSet::from_states(&q, split).unwrap();
            let f = FixedPointFormat::new(3, 1).unwrap();
            prop_assert_eq!(
                select(&a, Strategy::WeightedMean, &f, 2).unwrap(),
                select(&b, Strategy::WeightedMean, &f, 2).unwrap()
            );
        }
    }
}
