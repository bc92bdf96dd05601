//! Sample sets and the samplers that produce them.
//!
//! A [`SampleSet`] mirrors what an annealer returns for a batch of reads:
//! each distinct final state once, with its energy and how many reads
//! ended there. Entries are kept sorted by energy, ties broken by the
//! lexicographic order of the bit string.

mod annealing;
mod exhaustive;

pub use annealing::{sample_annealing, AnnealSchedule, SamplerConfig};
pub use exhaustive::{ground_states, sample_exhaustive, GroundStates, EXHAUSTIVE_CAP};

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::fixed_point::BitVector;
use crate::qubo::Qubo;

/// Distinct states with energies and occurrence counts.
///
/// States are bit-packed, 64 per word with variable `j` at bit
/// `63 - j % 64` of word `j / 64`, so comparing word slices compares bit
/// strings lexicographically.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    num_vars: usize,
    words: usize,
    states: Vec<u64>,
    energies: Vec<f64>,
    occurrences: Vec<u64>,
    num_reads: u64,
}

/// One entry of a [`SampleSet`].
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    state: &'a [u64],
    num_vars: usize,
    pub energy: f64,
    pub occurrences: u64,
}

impl Sample<'_> {
    pub fn bit(&self, j: usize) -> bool {
        self.state[j / 64] >> (63 - j % 64) & 1 == 1
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn packed(&self) -> &[u64] {
        self.state
    }

    pub fn to_bitvector(&self) -> BitVector {
        BitVector::new((0..self.num_vars).map(|j| u8::from(self.bit(j))).collect())
            .expect("packed bits are binary")
    }
}

pub(crate) fn words_for(num_vars: usize) -> usize {
    num_vars.div_ceil(64).max(1)
}

pub(crate) fn pack_bits(bits: &[u8], words: usize) -> Vec<u64> {
    let mut packed = vec![0u64; words];
    for (j, &b) in bits.iter().enumerate() {
        if b == 1 {
            packed[j / 64] |= 1 << (63 - j % 64);
        }
    }
    packed
}

fn entry_order(a: (f64, &[u64]), b: (f64, &[u64])) -> Ordering {
    a.0.total_cmp(&b.0).then_with(|| a.1.cmp(b.1))
}

impl SampleSet {
    pub fn empty(num_vars: usize) -> Self {
        Self {
            num_vars,
            words: words_for(num_vars),
            states: Vec::new(),
            energies: Vec::new(),
            occurrences: Vec::new(),
            num_reads: 0,
        }
    }

    /// Build from packed states and counts; energies are evaluated on `qubo`.
    pub(crate) fn from_packed_counts(qubo: &Qubo, counts: BTreeMap<Vec<u64>, u64>) -> Self {
        let num_vars = qubo.num_vars();
        let words = words_for(num_vars);
        let mut rows: Vec<(f64, Vec<u64>, u64)> = counts
            .into_iter()
            .map(|(state, occ)| {
                let energy = qubo.energy_by(|j| state[j / 64] >> (63 - j % 64) & 1 == 1);
                (energy, state, occ)
            })
            .collect();
        rows.sort_by(|a, b| entry_order((a.0, &a.1), (b.0, &b.1)));
        let mut set = Self::empty(num_vars);
        set.words = words;
        for (energy, state, occ) in rows {
            set.states.extend_from_slice(&state);
            set.energies.push(energy);
            set.occurrences.push(occ);
            set.num_reads += occ;
        }
        set
    }

    /// Build from explicit states and occurrence counts. Repeated states
    /// are combined; zero counts are rejected.
    pub fn from_states<I>(qubo: &Qubo, states: I) -> Result<Self>
    where
        I: IntoIterator<Item = (BitVector, u64)>,
    {
        let words = words_for(qubo.num_vars());
        let mut counts = BTreeMap::new();
        for (state, occ) in states {
            if state.len() != qubo.num_vars() {
                return Err(Error::Length {
                    expected: qubo.num_vars(),
                    found: state.len(),
                });
            }
            if occ == 0 {
                return Err(Error::Config("occurrence counts must be positive".into()));
            }
            *counts
                .entry(pack_bits(state.as_slice(), words))
                .or_insert(0) += occ;
        }
        Ok(Self::from_packed_counts(qubo, counts))
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_reads(&self) -> u64 {
        self.num_reads
    }

    /// Number of distinct states.
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn get(&self, i: usize) -> Option<Sample<'_>> {
        (i < self.len()).then(|| Sample {
            state: &self.states[i * self.words..(i + 1) * self.words],
            num_vars: self.num_vars,
            energy: self.energies[i],
            occurrences: self.occurrences[i],
        })
    }

    pub fn lowest(&self) -> Option<Sample<'_>> {
        self.get(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = Sample<'_>> + '_ {
        (0..self.len()).map(move |i| self.get(i).expect("index in range"))
    }

    /// Union of two read batches over the same variables.
    pub fn merge(&self, other: &SampleSet) -> Result<SampleSet> {
        if self.num_vars != other.num_vars {
            return Err(Error::Dimension(format!(
                "cannot merge sample sets over {} and {} variables",
                self.num_vars, other.num_vars
            )));
        }
        let mut combined: BTreeMap<&[u64], (f64, u64)> = BTreeMap::new();
        for s in self.iter().chain(other.iter()) {
            combined.entry(s.state).or_insert((s.energy, 0)).1 += s.occurrences;
        }
        let mut rows: Vec<_> = combined.into_iter().collect();
        rows.sort_by(|a, b| entry_order((a.1 .0, a.0), (b.1 .0, b.0)));
        let mut set = Self::empty(self.num_vars);
        for (state, (energy, occ)) in rows {
            set.states.extend_from_slice(state);
            set.energies.push(energy);
            set.occurrences.push(occ);
            set.num_reads += occ;
        }
        Ok(set)
    }

    /// Check every structural invariant against `qubo`: distinct states,
    /// sorted order, conserved read count and bit-exact energies.
    pub fn verify(&self, qubo: &Qubo) -> Result<()> {
        if qubo.num_vars() != self.num_vars {
            return Err(Error::Dimension("sample set and QUBO sizes differ".into()));
        }
        let total: u64 = self.occurrences.iter().sum();
        if total != self.num_reads {
            return Err(Error::Config(format!(
                "occurrences sum to {total} but num_reads is {}",
                self.num_reads
            )));
        }
        for (i, s) in self.iter().enumerate() {
            if s.occurrences == 0 {
                return Err(Error::Config(format!("entry {i} has zero occurrences")));
            }
            let exact = qubo.energy_by(|j| s.bit(j));
            if exact.to_bits() != s.energy.to_bits() {
                return Err(Error::Config(format!(
                    "entry {i} stores energy {} but evaluates to {exact}",
                    s.energy
                )));
            }
            if i > 0 {
                let prev = self.get(i - 1).expect("previous entry");
                if entry_order((prev.energy, prev.state), (s.energy, s.state)) != Ordering::Less {
                    return Err(Error::Config(format!(
                        "entries {} and {i} out of order",
                        i - 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// CSV with columns `energy,occurrences,state`, at most `limit` rows
    /// (lowest energies first) when a limit is given.
    pub fn write_csv<W: Write>(&self, writer: W, limit: Option<usize>) -> Result<()> {
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["energy", "occurrences", "state"])?;
        for s in self.iter().take(limit.unwrap_or(usize::MAX)) {
            out.write_record([
                format!("{:?}", s.energy),
                s.occurrences.to_string(),
                s.to_bitvector().to_string(),
            ])?;
        }
        out.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    /// Inverse of [`Self::write_csv`] for complete dumps.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut input = csv::Reader::from_reader(reader);
        let mut set: Option<SampleSet> = None;
        for record in input.records() {
            let record = record?;
            if record.len() != 3 {
                return Err(Error::Parse(format!(
                    "expected 3 columns, got {}",
                    record.len()
                )));
            }
            let energy: f64 = record[0]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad energy {:?}", &record[0])))?;
            let occ: u64 = record[1]
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad occurrence count {:?}", &record[1])))?;
            let state: BitVector = record[2].trim().parse()?;
            let set = set.get_or_insert_with(|| SampleSet::empty(state.len()));
            if state.len() != set.num_vars {
                return Err(Error::Length {
                    expected: set.num_vars,
                    found: state.len(),
                });
            }
            set.states.extend(pack_bits(state.as_slice(), set.words));
            set.energies.push(energy);
            set.occurrences.push(occ);
            set.num_reads += occ;
        }
        set.ok_or_else(|| Error::Parse("sample CSV has no rows".into()))
    }
}
