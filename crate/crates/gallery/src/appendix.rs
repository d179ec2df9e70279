use mfdm_measures::AtomicMeasure;
use mfdm_metric::sequence::{alphabet_max, SequenceSpace};
use mfdm_metric::{appendix_a_space, Error, MetricSpace, Point, Result};

/// Truncated non-density example: every word of length `depth` is an atom
/// carrying its cylinder mass, and `set` lists the words without a zero.
#[derive(Debug, Clone)]
pub struct AppendixA {
    pub measure: AtomicMeasure,
    pub set: Vec<usize>,
}

/// One `(word, n)` pair of the ratio identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioRow {
    pub atom: usize,
    pub n: usize,
    /// `r_n = ε_n 2^{-i_n}`.
    pub radius: f64,
    pub ball_mass: f64,
    /// `μ([i|_n])`, summed over the stored atoms.
    pub cylinder_mass: f64,
    /// `μ([i_1 … i_{n-1} 0])`, summed over the stored atoms.
    pub zero_mass: f64,
    /// `μ(A ∩ B(i, r_n))`.
    pub set_mass: f64,
    /// `μ([i|_n]) / μ(B(i, r_n))`.
    pub cylinder_ratio: f64,
    /// `μ(A ∩ B(i, r_n)) / μ(B(i, r_n))`.
    pub set_ratio: f64,
    pub formula: f64,
}

/// `(1 - 2^{-n}) / (1 - 2^{-n} + n)`.
pub fn ratio_formula(n: usize) -> f64 {
    let a = 1.0 - 0.5f64.powi(n as i32);
    a / (a + n as f64)
}

/// `μ([i0]) = 2^{-n} μ([i])` and `μ([ij]) = N_n^{-1}(1 - 2^{-n}) μ([i])` for
/// `1 ≤ j ≤ N_n`, applied from the first symbol on.
pub fn word_mass(word: &[u32]) -> f64 {
    word.iter()
        .enumerate()
        .map(|(k, &s)| {
            let n = k + 1;
            let h = 0.5f64.powi(n as i32);
            if s == 0 {
                h
            } else {
                (1.0 - h) / alphabet_max(n) as f64
            }
        })
        .product()
}

/// The appendix space truncated at `depth` with its measure and the set `A`.
///
/// Exact per level: the ball `B(i, r_n)` is `[i|_n] ∪ [i_1 … i_{n-1} 0]`, so
/// the cylinder ratio equals [`ratio_formula`]. The vanishing lower density
/// is the limit `n → ∞`.
pub fn gallery_appendix_a(depth: usize) -> Result<AppendixA> {
    let space = appendix_a_space(depth)?;
    let masses: Vec<f64> = (0..space.len()).map(|i| word_mass(space.word(i).unwrap())).collect();
    let measure = AtomicMeasure::new(space, masses, false)?;
    let set = (0..measure.len()).filter(|&i| measure.space().word(i).unwrap().iter().all(|&s| s != 0)).collect();
    Ok(AppendixA { measure, set })
}

impl AppendixA {
    pub fn space(&self) -> &MetricSpace {
        self.measure.space()
    }

    pub fn sequence(&self) -> &SequenceSpace {
        self.space().sequence_space().expect("appendix measures live on a sequence space")
    }

    pub fn depth(&self) -> usize {
        self.sequence().depth()
    }

    /// Mass of the atoms whose words start with `prefix`.
    pub fn cylinder_mass(&self, prefix: &[u32]) -> f64 {
        (0..self.measure.len())
            .filter(|&i| self.space().word(i).unwrap().starts_with(prefix))
            .map(|i| self.measure.mass(i))
            .sum()
    }

    /// Ratio rows for one stored word of `A` and one level.
    pub fn ratio_row(&self, atom: usize, n: usize) -> Result<RatioRow> {
        let word = self.space().word(atom).ok_or_else(|| Error::domain("no such atom"))?.to_vec();
        if n == 0 || n > word.len() {
            return Err(Error::Depth(format!("level {n} outside 1..={}", word.len())));
        }
        if word.contains(&0) {
            return Err(Error::precondition("the word is not in A"));
        }
        let radius = self.sequence().nondensity_radius(&word, n);
        let members = self.measure.ball_atoms(&Point::Index(atom), radius);
        let ball_mass: f64 = members.iter().map(|&i| self.measure.mass(i)).sum();
        let in_set = |i: usize| self.space().word(i).unwrap().iter().all(|&s| s != 0);
        let set_mass: f64 = members.iter().filter(|&&i| in_set(i)).map(|&i| self.measure.mass(i)).sum();
        let cylinder_mass = self.cylinder_mass(&word[..n]);
        let mut zero = word[..n].to_vec();
        zero[n - 1] = 0;
        let zero_mass = self.cylinder_mass(&zero);
        Ok(RatioRow {
            atom,
            n,
            radius,
            ball_mass,
            cylinder_mass,
            zero_mass,
            set_mass,
            cylinder_ratio: cylinder_mass / ball_mass,
            set_ratio: set_mass / ball_mass,
            formula: ratio_formula(n),
        })
    }

    /// Every stored word of `A` against every level.
    pub fn ratio_rows(&self) -> Result<Vec<RatioRow>> {
        let mut out = Vec::with_capacity(self.set.len() * self.depth());
        for &a in &self.set {
            for n in 1..=self.depth() {
                out.push(self.ratio_row(a, n)?);
            }
        }
        Ok(out)
    }
}
