//! Partially separable deterministic hidden-variable models at n = 3:
//! per hidden value, the two particles on one side of a bipartition share
//! an arbitrary (possibly Cirelson-violating) +/-1 correlator table while
//! the third particle gets independent +/-1 values, and the full
//! three-particle correlator factors across the cut. Includes the
//! two-valued counterexample model and exhaustive vertex enumeration of
//! the partially separable polytope.

use crate::error::{QbError, Result};
use crate::operators::TermExpansion;
use serde::Serialize;

/// Which two particles form the correlated pair (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bipartition3 {
    pub pair: (usize, usize),
    pub single: usize,
}

impl Bipartition3 {
    pub fn all() -> [Bipartition3; 3] {
        [
            Bipartition3 { pair: (0, 1), single: 2 },
            Bipartition3 { pair: (0, 2), single: 1 },
            Bipartition3 { pair: (1, 2), single: 0 },
        ]
    }
}

/// One deterministic hidden value: +/-1 for each of the four pair
/// correlators (indexed by the primed/unprimed choice on each pair member)
/// and for the two single-particle observables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeterministicAssignment {
    pub bipartition: Bipartition3,
    /// pair_values[ci][cj]: value of the correlator with choice ci on the
    /// first pair member and cj on the second (0 = unprimed).
    pub pair_values: [[i64; 2]; 2],
    /// single_values[c]: value of the lone particle's observable.
    pub single_values: [i64; 2],
}

impl DeterministicAssignment {
    fn validate(&self) -> Result<()> {
        let ok = self
            .pair_values
            .iter()
            .flatten()
            .chain(self.single_values.iter())
            .all(|&v| v == 1 || v == -1);
        if !ok {
            return Err(QbError::MissingAssignment(
                "all correlator values must be +/-1".into(),
            ));
        }
        Ok(())
    }

    /// The factored value of one product term: pair correlator times the
    /// single-particle value.
    fn term_value(&self, choice: &[bool]) -> Result<i64> {
        if choice.len() != 3 {
            return Err(QbError::ParticleCount {
                n: choice.len(),
                detail: "HV models are three-particle".into(),
            });
        }
        let (i, j) = self.bipartition.pair;
        let ci = choice[i] as usize;
        let cj = choice[j] as usize;
        let cs = choice[self.bipartition.single] as usize;
        Ok(self.pair_values[ci][cj] * self.single_values[cs])
    }

    fn negated(&self) -> Self {
        let mut out = self.clone();
        for row in &mut out.pair_values {
            for v in row.iter_mut() {
                *v = -*v;
            }
        }
        for v in &mut out.single_values {
            *v = -*v;
        }
        out
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HVModel {
    pub assignments: Vec<DeterministicAssignment>,
    pub weights: Vec<f64>,
}

impl HVModel {
    pub fn new(assignments: Vec<DeterministicAssignment>, weights: Vec<f64>) -> Result<Self> {
        if assignments.len() != weights.len() || assignments.is_empty() {
            return Err(QbError::InvalidWeights(
                "assignment/weight count mismatch".into(),
            ));
        }
        if weights.iter().any(|&w| w < 0.0)
            || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-12
        {
            return Err(QbError::InvalidWeights("weights must be a distribution".into()));
        }
        for a in &assignments {
            a.validate()?;
        }
        Ok(Self { assignments, weights })
    }
}

/// Expectation of a Bell expression under the model: integer term sums per
/// hidden value, weights applied last.
pub fn eval_hv(model: &HVModel, expansion: &TermExpansion) -> Result<f64> {
    if expansion.n != 3 {
        return Err(QbError::ParticleCount {
            n: expansion.n,
            detail: "HV evaluation is three-particle".into(),
        });
    }
    let mut total = 0.0_f64;
    for (assignment, &weight) in model.assignments.iter().zip(&model.weights) {
        let value = assignment_value(assignment, expansion)?;
        total += weight * value;
    }
    Ok(total)
}

/// Exact dyadic-rational value of the expression at one vertex.
fn assignment_value(
    assignment: &DeterministicAssignment,
    expansion: &TermExpansion,
) -> Result<f64> {
    let mut num = 0i64;
    let mut den_log2 = 0u32;
    for term in &expansion.terms {
        let d = term.coeff.den_log2;
        if d > den_log2 {
            num <<= d - den_log2;
            den_log2 = d;
        }
        num += term.coeff.num * (1i64 << (den_log2 - d)) * assignment.term_value(&term.choice)?;
    }
    Ok(num as f64 / (1u64 << den_log2) as f64)
}

/// The two-valued counterexample model on the {1,2}|{3} cut:
/// AB = AB' = A'B = C = 1, A'B' = C' = -1 for one hidden value, all
/// negated for the other, equal weights.
pub fn paper_example_model() -> HVModel {
    let first = DeterministicAssignment {
        bipartition: Bipartition3 { pair: (0, 1), single: 2 },
        pair_values: [[1, 1], [1, -1]],
        single_values: [1, -1],
    };
    let second = first.negated();
    HVModel::new(vec![first, second], vec![0.5, 0.5]).expect("valid by construction")
}

#[derive(Debug, Clone, Serialize)]
pub struct EnumerationRecord {
    pub bipartition: Bipartition3,
    /// assignment bits: 4 pair bits (row-major) then 2 single bits,
    /// 1 = value -1.
    pub bits: u8,
    pub values: Vec<f64>,
}

fn assignment_from_bits(bipartition: Bipartition3, bits: u8) -> DeterministicAssignment {
    let sign = |b: bool| if b { -1i64 } else { 1i64 };
    DeterministicAssignment {
        bipartition,
        pair_values: [
            [sign(bits & 0b10_0000 != 0), sign(bits & 0b01_0000 != 0)],
            [sign(bits & 0b00_1000 != 0), sign(bits & 0b00_0100 != 0)],
        ],
        single_values: [sign(bits & 0b00_0010 != 0), sign(bits & 0b00_0001 != 0)],
    }
}

/// Every vertex of the three-particle partially separable polytope:
/// 3 bipartitions x 2^6 deterministic assignments.
pub fn enumerate_vertices(expansions: &[TermExpansion]) -> Result<Vec<EnumerationRecord>> {
    let mut out = Vec::with_capacity(192);
    for bipartition in Bipartition3::all() {
        for bits in 0..64u8 {
            let assignment = assignment_from_bits(bipartition, bits);
            let values = expansions
                .iter()
                .map(|e| assignment_value(&assignment, e))
                .collect::<Result<Vec<f64>>>()?;
            out.push(EnumerationRecord { bipartition, bits, values });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct PolytopeMax {
    pub max_value: f64,
    pub witness: EnumerationRecord,
}

/// Exact maximum of a linear expression over the partially separable
/// polytope (attained at a vertex).
pub fn brute_force_ps_max(expansion: &TermExpansion) -> Result<PolytopeMax> {
    let records = enumerate_vertices(std::slice::from_ref(expansion))?;
    let best = records
        .into_iter()
        .max_by(|a, b| a.values[0].partial_cmp(&b.values[0]).unwrap())
        .expect("non-empty enumeration");
    Ok(PolytopeMax {
        max_value: best.values[0],
        witness: best,
    })
}

/// Maximum of the quadratic sum over vertices; by convexity in the mixing
/// weight this is also exact on every two-point mixture, and a lower bound
/// on the full polytope maximum.
pub fn brute_force_ps_quadratic_max(
    expansion_a: &TermExpansion,
    expansion_b: &TermExpansion,
) -> Result<PolytopeMax> {
    let records = enumerate_vertices(&[expansion_a.clone(), expansion_b.clone()])?;
    let best = records
        .into_iter()
        .max_by(|a, b| {
            let qa = a.values[0] * a.values[0] + a.values[1] * a.values[1];
            let qb = b.values[0] * b.values[0] + b.values[1] * b.values[1];
            qa.partial_cmp(&qb).unwrap()
        })
        .expect("non-empty enumeration");
    Ok(PolytopeMax {
        max_value: best.values[0] * best.values[0] + best.values[1] * best.values[1],
        witness: best,
    })
}

/// Maximum of a linear expression over fully local deterministic models
/// (pair correlators factoring into single-particle values).
pub fn brute_force_local_max(expansion: &TermExpansion) -> Result<f64> {
    let sign = |b: bool| if b { -1i64 } else { 1i64 };
    let mut best = f64::NEG_INFINITY;
    for bits in 0..64u8 {
        // v(A), v(A'), v(B), v(B'), v(C), v(C')
        let v: Vec<i64> = (0..6).map(|k| sign(bits & (1 << k) != 0)).collect();
        let assignment = DeterministicAssignment {
            bipartition: Bipartition3 { pair: (0, 1), single: 2 },
            pair_values: [
                [v[0] * v[2], v[0] * v[3]],
                [v[1] * v[2], v[1] * v[3]],
            ],
            single_values: [v[4], v[5]],
        };
        best = best.max(assignment_value(&assignment, expansion)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_f, build_s};
    use crate::settings::MeasurementSettings;

    fn expansions() -> (TermExpansion, TermExpansion, TermExpansion, TermExpansion) {
        let s = MeasurementSettings::mermin_xy(3);
        (
            build_f(3, &s, false).unwrap().expansion(),
            build_f(3, &s, true).unwrap().expansion(),
            build_s(3, &s, true).unwrap().expansion(),
            build_s(3, &s, false).unwrap().expansion(),
        )
    }

    #[test]
    fn paper_model_values() {
        let (f, fp, sp, sm) = expansions();
        let model = paper_example_model();
        assert_eq!(eval_hv(&model, &sp).unwrap(), 4.0);
        assert_eq!(eval_hv(&model, &sm).unwrap(), 4.0);
        let fv = eval_hv(&model, &f).unwrap();
        let fpv = eval_hv(&model, &fp).unwrap();
        assert_eq!((fv, fpv), (0.0, -4.0));
        // q_f = 16 > 8; q_s = 32 > 16; the quadratic witnesses fail for
        // partially separable HV theories while the linear one holds
        assert_eq!(fv * fv + fpv * fpv, 16.0);
        // cross-check via the linear system S+ = -F - F', S- = F - F'
        assert_eq!(-fv - fpv, 4.0);
        assert_eq!(fv - fpv, 4.0);
    }

    #[test]
    fn paper_model_violates_two_particle_quadratic() {
        // restricted to the pair: x = v(AB') + v(A'B) = 2, y = v(AB) - v(A'B') = 2
        let model = paper_example_model();
        let a = &model.assignments[0];
        let x = a.pair_values[0][1] + a.pair_values[1][0];
        let y = a.pair_values[0][0] - a.pair_values[1][1];
        assert_eq!((x, y), (2, 2));
        assert_eq!(x * x + y * y, 8); // exceeds the quantum cap of 4
    }

    #[test]
    fn mixture_with_negation_cancels() {
        let (f, _, _, _) = expansions();
        let a = paper_example_model().assignments[0].clone();
        let model = HVModel::new(vec![a.clone(), a.negated()], vec![0.5, 0.5]).unwrap();
        assert_eq!(eval_hv(&model, &f).unwrap(), 0.0);
    }

    #[test]
    fn linearity_in_weights() {
        let (_, _, sp, _) = expansions();
        let a = assignment_from_bits(Bipartition3 { pair: (0, 2), single: 1 }, 0b10_1101);
        let b = assignment_from_bits(Bipartition3 { pair: (1, 2), single: 0 }, 0b01_0110);
        let va = eval_hv(&HVModel::new(vec![a.clone()], vec![1.0]).unwrap(), &sp).unwrap();
        let vb = eval_hv(&HVModel::new(vec![b.clone()], vec![1.0]).unwrap(), &sp).unwrap();
        let w = 0.25;
        let mixed = eval_hv(&HVModel::new(vec![a, b], vec![w, 1.0 - w]).unwrap(), &sp).unwrap();
        assert_eq!(mixed, w * va + (1.0 - w) * vb);
    }

    #[test]
    fn vertex_enumeration_bounds() {
        let (f, _, sp, sm) = expansions();
        assert_eq!(brute_force_ps_max(&sp).unwrap().max_value, 4.0);
        assert_eq!(brute_force_ps_max(&sm).unwrap().max_value, 4.0);
        // every vertex respects |<S+/->| <= 4 exactly
        for rec in enumerate_vertices(&[sp.clone(), sm.clone()]).unwrap() {
            assert!(rec.values[0].abs() <= 4.0);
            assert!(rec.values[1].abs() <= 4.0);
        }
        // partially separable models exceed the quantum biseparable F bound
        assert_eq!(brute_force_ps_max(&f).unwrap().max_value, 4.0);
    }

    #[test]
    fn quadratic_vertex_max_reaches_32() {
        let (_, _, sp, sm) = expansions();
        let q = brute_force_ps_quadratic_max(&sp, &sm).unwrap();
        assert!(q.max_value >= 32.0);
    }

    #[test]
    fn paper_model_assignments_are_vertices() {
        let (f, fp, _, _) = expansions();
        let records = enumerate_vertices(&[f, fp]).unwrap();
        for a in &paper_example_model().assignments {
            assert!(records.iter().any(|r| {
                assignment_from_bits(r.bipartition, r.bits) == *a
            }));
        }
    }

    #[test]
    fn local_restriction_hits_mermin_bound() {
        let (f, _, _, _) = expansions();
        assert_eq!(brute_force_local_max(&f).unwrap(), 2.0);
    }

    #[test]
    fn two_vertex_edge_scan_cannot_beat_vertices() {
        // q is convex in the mixing weight, so a coarse scan over edges
        // never exceeds the vertex maximum
        let (_, _, sp, sm) = expansions();
        let records = enumerate_vertices(&[sp, sm]).unwrap();
        let vertex_max = records
            .iter()
            .map(|r| r.values[0] * r.values[0] + r.values[1] * r.values[1])
            .fold(f64::NEG_INFINITY, f64::max);
        let mut edge_max = f64::NEG_INFINITY;
        for (i, a) in records.iter().enumerate().step_by(17) {
            for b in records.iter().skip(i + 1).step_by(23) {
                for k in 0..=8 {
                    let t = k as f64 / 8.0;
                    let x = t * a.values[0] + (1.0 - t) * b.values[0];
                    let y = t * a.values[1] + (1.0 - t) * b.values[1];
                    edge_max = edge_max.max(x * x + y * y);
                }
            }
        }
        assert!(edge_max <= vertex_max + 1e-12);
    }
}
