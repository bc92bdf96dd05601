//! Least-squares to QUBO conversion.
//!
//! Minimizing `||Ad q - b||^2` over binary `q` is equivalent to minimizing
//!
//! ```text
//! f(q) = sum_j v_j q_j + sum_{j<k} w_jk q_j q_k
//! v_j  = sum_i Ad_ij (Ad_ij - 2 b_i)
//! w_jk = 2 sum_i Ad_ij Ad_ik
//! ```
//!
//! because `q_j^2 = q_j`. The dropped constant `||b||^2` is kept as
//! [`Qubo::offset`] so that `f(q) + offset` is the squared residual.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Couplings with magnitude below this are dropped from the map.
pub const COUPLING_EPSILON: f64 = 1e-15;

/// Logical size below which an embedding is assumed to exist.
pub const DEFAULT_EMBEDDING_BUDGET: usize = 54;

#[derive(Debug, Clone, PartialEq)]
pub struct Qubo {
    linear: Vec<f64>,
    couplings: BTreeMap<(usize, usize), f64>,
    offset: f64,
    // (k, w_kj) for k < j, ascending k.
    lower: Vec<Vec<(usize, f64)>>,
    // (k, w_jk) for every k != j.
    neighbors: Vec<Vec<(usize, f64)>>,
}

impl Qubo {
    pub fn new(
        linear: Vec<f64>,
        couplings: BTreeMap<(usize, usize), f64>,
        offset: f64,
    ) -> Result<Self> {
        let m = linear.len();
        let mut lower = vec![Vec::new(); m];
        let mut neighbors = vec![Vec::new(); m];
        for (&(j, k), &w) in &couplings {
            if j >= k || k >= m {
                return Err(Error::Dimension(format!(
                    "coupling ({j}, {k}) is not strictly upper-triangular in {m} variables"
                )));
            }
            lower[k].push((j, w));
            neighbors[j].push((k, w));
            neighbors[k].push((j, w));
        }
        for list in neighbors.iter_mut().chain(lower.iter_mut()) {
            list.sort_by_key(|&(k, _)| k);
        }
        Ok(Self {
            linear,
            couplings,
            offset,
            lower,
            neighbors,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.linear.len()
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn couplings(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.couplings
    }

    pub fn coupling(&self, j: usize, k: usize) -> f64 {
        let key = if j < k { (j, k) } else { (k, j) };
        self.couplings.get(&key).copied().unwrap_or(0.0)
    }

    /// `||b||^2`, the constant dropped from the squared residual.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// Couplings of variable `j` to every other variable, ascending index.
    pub fn neighbors(&self, j: usize) -> &[(usize, f64)] {
        &self.neighbors[j]
    }

    /// Largest absolute linear weight or coupling.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.linear
            .iter()
            .chain(self.couplings.values())
            .fold(0.0, |m, c| m.max(c.abs()))
    }

    /// `f(q)`.
    pub fn eval_energy(&self, q: &[u8]) -> Result<f64> {
        if q.len() != self.num_vars() {
            return Err(Error::Length {
                expected: self.num_vars(),
                found: q.len(),
            });
        }
        if let Some(&bad) = q.iter().find(|&&b| b > 1) {
            return Err(Error::InvalidBit(bad));
        }
        Ok(self.energy_by(|j| q[j] == 1))
    }

    /// Energy of the state whose bit `j` is `is_set(j)`.
    ///
    /// Terms are accumulated variable by variable: for each set `j` in
    /// index order, `v_j` and then `w_kj` for every set `k < j` in ascending
    /// `k`. The partial sum after variable `j` depends only on bits `0..=j`,
    /// which lets enumerators share prefixes. Every evaluator in the crate
    /// uses this order so stored energies are bit-identical.
    pub fn energy_by(&self, is_set: impl Fn(usize) -> bool) -> f64 {
        let mut energy = 0.0;
        for j in 0..self.num_vars() {
            energy = self.accumulate(energy, j, &is_set);
        }
        energy
    }

    /// One step of [`Self::energy_by`]: add the terms owned by variable `j`.
    #[inline]
    pub(crate) fn accumulate(
        &self,
        mut energy: f64,
        j: usize,
        is_set: impl Fn(usize) -> bool,
    ) -> f64 {
        if is_set(j) {
            energy += self.linear[j];
            for &(k, w) in &self.lower[j] {
                if is_set(k) {
                    energy += w;
                }
            }
        }
        energy
    }

    /// Plain-text triplet form: a `M offset` header, then `j j v_j` for
    /// every variable and `j k w_jk` for every coupling, 1-based indices.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {:?}", self.num_vars(), self.offset);
        for (j, v) in self.linear.iter().enumerate() {
            let _ = writeln!(out, "{} {} {:?}", j + 1, j + 1, v);
        }
        for (&(j, k), w) in &self.couplings {
            let _ = writeln!(out, "{} {} {:?}", j + 1, k + 1, w);
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .enumerate()
            .filter(|(_, l)| !l.is_empty());
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse("missing QUBO header".into()))?;
        let mut head = header.split_whitespace();
        let m: usize = parse_field(head.next(), "variable count", 1)?;
        let offset: f64 = parse_field(head.next(), "offset", 1)?;

        let mut linear = vec![0.0; m];
        let mut seen = vec![false; m];
        let mut couplings = BTreeMap::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let mut fields = line.split_whitespace();
            let j: usize = parse_field(fields.next(), "row index", lineno)?;
            let k: usize = parse_field(fields.next(), "column index", lineno)?;
            let value: f64 = parse_field(fields.next(), "value", lineno)?;
            if fields.next().is_some() || j == 0 || k == 0 || j > m || k > m || j > k {
                return Err(Error::Parse(format!(
                    "line {lineno}: malformed entry {line:?}"
                )));
            }
            if j == k {
                linear[j - 1] = value;
                seen[j - 1] = true;
            } else if couplings.insert((j - 1, k - 1), value).is_some() {
                return Err(Error::Parse(format!("line {lineno}: duplicate coupling")));
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::Parse(format!(
                "no linear entry for variable {}",
                missing + 1
            )));
        }
        Self::new(linear, couplings, offset)
    }

    pub fn write_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    pub fn read_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_text(&text)
    }
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, what: &str, line: usize) -> Result<T> {
    field
        .ok_or_else(|| Error::Parse(format!("line {line}: missing {what}")))?
        .parse()
        .map_err(|_| Error::Parse(format!("line {line}: invalid {what}")))
}

/// Build the QUBO of `min_q ||ad q - b||^2`.
pub fn build_qubo(ad: &DMatrix<f64>, b: &[f64]) -> Result<Qubo> {
    if ad.nrows() != b.len() {
        return Err(Error::Dimension(format!(
            "matrix has {} rows but right-hand side has {} entries",
            ad.nrows(),
            b.len()
        )));
    }
    let m = ad.ncols();
    let linear = (0..m)
        .map(|j| {
            ad.column(j)
                .iter()
                .zip(b)
                .map(|(a, bi)| a * (a - 2.0 * bi))
                .sum()
        })
        .collect();
    let mut couplings = BTreeMap::new();
    for j in 0..m {
        for k in j + 1..m {
            let w = 2.0 * ad.column(j).dot(&ad.column(k));
            if w.abs() >= COUPLING_EPSILON {
                couplings.insert((j, k), w);
            }
        }
    }
    let offset = b.iter().map(|x| x * x).sum();
    Qubo::new(linear, couplings, offset)
}

/// Binary variables needed for `grid_points` points at `precision` bits
/// once the two wall values are eliminated.
pub fn logical_problem_size(grid_points: usize, precision: usize) -> usize {
    grid_points.saturating_sub(2) * precision
}

/// Whether a logical problem of `size` variables is expected to embed.
pub fn embeddable_hint(size: usize, budget: usize) -> bool {
    size <= budget
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel_flow::{assemble_system, FlowParams, SolutionProfile};
    use crate::fixed_point::FixedPointFormat;
    use proptest::prelude::*;

    fn residual_sq(ad: &DMatrix<f64>, b: &[f64], q: &[u8]) -> f64 {
        (0..ad.nrows())
            .map(|i| {
                let r: f64 = (0..ad.ncols())
                    .map(|j| ad[(i, j)] * f64::from(q[j]))
                    .sum::<f64>()
                    - b[i];
                r * r
            })
            .sum()
    }

    fn bits_of(code: u64, m: usize) -> Vec<u8> {
        (0..m).map(|j| ((code >> j) & 1) as u8).collect()
    }

    #[test]
    fn single_variable() {
        let q = build_qubo(&DMatrix::from_row_slice(1, 1, &[1.0]), &[1.0]).unwrap();
        assert_eq!(q.linear(), &[-1.0]);
        assert!(q.couplings().is_empty());
        assert_eq!(q.offset(), 1.0);
    }

    #[test]
    fn two_variables_symbolic_expansion() {
        // (q1 + 0.5 q2 - 0.75)^2 = -0.5 q1 - 0.5 q2 + q1 q2 + 0.5625
        let q = build_qubo(&DMatrix::from_row_slice(1, 2, &[1.0, 0.5]), &[0.75]).unwrap();
        assert_eq!(q.linear(), &[-0.5, -0.5]);
        assert_eq!(q.couplings().len(), 1);
        assert_eq!(q.coupling(0, 1), 1.0);
        assert_eq!(q.offset(), 0.5625);
    }

    #[test]
    fn reference_first_step_minimum_matches_residual() {
        let p = FlowParams::default();
        let sys = assemble_system(&p, &SolutionProfile::zeros(5)).unwrap();
        let fmt = FixedPointFormat::new(2, 1).unwrap();
        let ad = fmt.expand_matrix(&sys.to_dense());
        let qubo = build_qubo(&ad, &sys.rhs).unwrap();
        assert_eq!(qubo.num_vars(), 6);
        let b2: f64 = sys.rhs.iter().map(|x| x * x).sum();
        let (mut min_f, mut min_r) = (f64::INFINITY, f64::INFINITY);
        for code in 0..64 {
            let bits = bits_of(code, 6);
            min_f = min_f.min(qubo.eval_energy(&bits).unwrap());
            min_r = min_r.min(residual_sq(&ad, &sys.rhs, &bits) - b2);
        }
        assert!((min_f - min_r).abs() < 1e-12);
    }

    #[test]
    fn energy_examples() {
        let q = build_qubo(
            &DMatrix::from_row_slice(2, 3, &[1.0, -0.5, 0.2, 0.3, 0.7, -1.1]),
            &[0.4, -0.2],
        )
        .unwrap();
        assert_eq!(q.eval_energy(&[0, 0, 0]).unwrap(), 0.0);
        for j in 0..3 {
            let mut s = [0u8; 3];
            s[j] = 1;
            assert_eq!(q.eval_energy(&s).unwrap(), q.linear()[j]);
        }
        assert!(matches!(q.eval_energy(&[0, 1]), Err(Error::Length { .. })));
        assert!(matches!(
            q.eval_energy(&[0, 1, 2]),
            Err(Error::InvalidBit(2))
        ));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let ad = DMatrix::from_row_slice(2, 1, &[1.0, 2.0]);
        assert!(matches!(build_qubo(&ad, &[1.0]), Err(Error::Dimension(_))));
    }

    #[test]
    fn bad_coupling_keys_rejected() {
        let mut w = BTreeMap::new();
        w.insert((1, 0), 1.0);
        assert!(Qubo::new(vec![0.0; 2], w, 0.0).is_err());
        let mut w = BTreeMap::new();
        w.insert((0, 2), 1.0);
        assert!(Qubo::new(vec![0.0; 2], w, 0.0).is_err());
    }

    #[test]
    fn problem_size_table() {
        assert_eq!(logical_problem_size(5, 8), 24);
        assert_eq!(logical_problem_size(8, 7), 42);
        assert_eq!(logical_problem_size(3, 1), 1);
        assert!(embeddable_hint(42, DEFAULT_EMBEDDING_BUDGET));
        assert!(!embeddable_hint(56, DEFAULT_EMBEDDING_BUDGET));
        assert!(embeddable_hint(1, DEFAULT_EMBEDDING_BUDGET));
    }

    #[test]
    fn tridiagonal_source_gives_banded_couplings() {
        // A^T A of a tridiagonal A is pentadiagonal, so blocks up to two
        // grid points apart interact and nothing further.
        for (ngp, n) in [(5, 3), (7, 2), (9, 4)] {
            let p = FlowParams::default().with_grid_points(ngp);
            let sys = assemble_system(&p, &SolutionProfile::zeros(ngp)).unwrap();
            let fmt = FixedPointFormat::new(n, 1).unwrap();
            let qubo = build_qubo(&fmt.expand_matrix(&sys.to_dense()), &sys.rhs).unwrap();
            let n = n as usize;
            let mut widest = 0;
            for &(j, k) in qubo.couplings().keys() {
                widest = widest.max((k / n).abs_diff(j / n));
            }
            assert_eq!(widest, 2);
            let interior = ngp - 2;
            let expected =
                interior * n * (n - 1) / 2 + (interior - 1) * n * n + (interior - 2) * n * n;
            assert_eq!(qubo.couplings().len(), expected);
        }
    }

    #[test]
    fn text_format_layout() {
        let q = build_qubo(&DMatrix::from_row_slice(1, 2, &[1.0, 0.5]), &[0.75]).unwrap();
        assert_eq!(q.to_text(), "2 0.5625\n1 1 -0.5\n2 2 -0.5\n1 2 1.0\n");
        assert!(Qubo::from_text("2 0.0\n1 1 1.0\n").is_err());
        assert!(Qubo::from_text("2 0.0\n1 1 1.0\n2 2 1.0\n2 1 3.0\n").is_err());
    }

    fn random_system() -> impl Strategy<Value = (DMatrix<f64>, Vec<f64>)> {
        (1usize..4, 1usize..9).prop_flat_map(|(rows, cols)| {
            (
                proptest::collection::vec(-2.0f64..2.0, rows * cols),
                proptest::collection::vec(-2.0f64..2.0, rows),
            )
                .prop_map(move |(a, b)| (DMatrix::from_row_slice(rows, cols, &a), b))
        })
    }

    proptest! {
        #[test]
        fn energy_plus_offset_is_squared_residual((ad, b) in random_system()) {
            let qubo = build_qubo(&ad, &b).unwrap();
            let m = ad.ncols();
            for code in 0..(1u64 << m) {
                let bits = bits_of(code, m);
                let lhs = qubo.eval_energy(&bits).unwrap() + qubo.offset();
                let rhs = residual_sq(&ad, &b, &bits);
                prop_assert!((lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0));
            }
        }

        #[test]
        fn text_round_trip_is_bit_exact((ad, b) in random_system()) {
            let qubo = build_qubo(&ad, &b).unwrap();
            let back = Qubo::from_text(&qubo.to_text()).unwrap();
            prop_assert_eq!(back, qubo);
        }

        #[test]
        fn permuting_variables_preserves_energies((ad, b) in random_system(), rot in 0usize..8) {
            let m = ad.ncols();
            let perm: Vec<usize> = (0..m).map(|j| (j + rot) % m).collect();
            let permuted = DMatrix::from_fn(ad.nrows(), m, |i, j| ad[(i, perm[j])]);
            let q1 = build_qubo(&ad, &b).unwrap();
            let q2 = build_qubo(&permuted, &b).unwrap();
            for code in 0..(1u64 << m) {
                let bits = bits_of(code, m);
                // q2 variable j is q1 variable perm[j]
                let mut moved = vec![0u8; m];
                for j in 0..m {
                    moved[j] = bits[perm[j]];
                }
                let e1 = q1.eval_energy(&bits).unwrap();
                let e2 = q2.eval_energy(&moved).unwrap();
                prop_assert!((e1 - e2).abs() <= 1e-12 * (1.0 + e1.abs()));
            }
        }
    }
}
