//! Lowering circuits to formulas and formulas to branching programs.

use std::collections::BTreeMap;

use serde::Serialize;

use super::depth::{depth_reduce, StageLedger};
use crate::abp::Abp;
use crate::algebra::field::Scalar;
use crate::circuit::{Circuit, CircuitBuilder, Gate, GateId};
use crate::error::{Error, Result};
use crate::Limits;

/// Number of gates `circuit_to_formula` would produce, saturating.
pub fn formula_size<F: Scalar>(circuit: &Circuit<F>) -> u128 {
    let reach = circuit.reachable();
    let mut size = vec![0u128; circuit.size()];
    for (id, g) in circuit.gates().iter().enumerate() {
        if reach[id] {
            size[id] = g
                .children()
                .iter()
                .fold(1u128, |acc, &c| acc.saturating_add(size[c]));
        }
    }
    size[circuit.output()]
}

/// Unfolds shared gates so that every gate has a single parent.
///
/// Fails with [`Error::SizeCeilingExceeded`] before building anything when
/// the result would have more than `limits.size` gates.
pub fn circuit_to_formula<F: Scalar>(circuit: &Circuit<F>, limits: &Limits) -> Result<Circuit<F>> {
    let size = formula_size(circuit);
    if size > limits.size as u128 {
        return Err(Error::SizeCeilingExceeded {
            size: size.min(usize::MAX as u128) as usize,
            ceiling: limits.size,
        });
    }
    let mut b = CircuitBuilder::new();
    let out = copy_tree(circuit, circuit.output(), &mut b);
    b.finish(circuit.partition().clone(), out)
}

fn copy_tree<F: Scalar>(c: &Circuit<F>, g: GateId, b: &mut CircuitBuilder<F>) -> GateId {
    let gate = &c.gates()[g];
    let kids: Vec<GateId> = gate
        .children()
        .iter()
        .map(|&x| copy_tree(c, x, b))
        .collect();
    let mut next = kids.into_iter();
    b.push(gate.map_children(|_| next.next().expect("one copy per child")))
}

/// Intermediate value of the bottom-up lowering.
enum Part<F> {
    Zero,
    Scalar(F),
    Program(Abp<F>),
}

/// Lowers a formula to a branching program.
///
/// Leaves become one-edge programs, sums are composed in parallel and
/// products in series, with the factor whose support has the smaller least
/// bucket read first. Constant factors scale the program.
pub fn formula_to_abp<F: Scalar>(formula: &Circuit<F>) -> Result<Abp<F>> {
    if let Some(g) = formula.first_shared_gate() {
        return Err(Error::NotAFormula { gate: g });
    }
    formula.index_sets()?;
    match lower(formula, formula.output())? {
        Part::Program(a) => Ok(a),
        Part::Scalar(_) => Err(Error::DegreeZero),
        Part::Zero => Err(Error::ZeroProgram),
    }
}

fn lower<F: Scalar>(f: &Circuit<F>, g: GateId) -> Result<Part<F>> {
    Ok(match &f.gates()[g] {
        Gate::Input(v) => Part::Program(Abp::linear_form(
            f.partition().clone(),
            v.bucket,
            BTreeMap::from([(v.col, F::one())]),
        )?),
        Gate::Const(c) if c.is_zero() => Part::Zero,
        Gate::Const(c) => Part::Scalar(c.clone()),
        Gate::Add(args) => {
            let mut acc = Part::Zero;
            for &a in args {
                acc = match (acc, lower(f, a)?) {
                    (x, Part::Zero) | (Part::Zero, x) => x,
                    (Part::Scalar(x), Part::Scalar(y)) => nonzero(x + y),
                    (Part::Program(x), Part::Program(y)) => match x.compose_parallel(&y) {
                        Ok(p) => Part::Program(p),
                        Err(Error::ZeroProgram) => Part::Zero,
                        Err(e) => return Err(e),
                    },
                    _ => return Err(Error::ConstInAddWithVariables { gate: g }),
                };
            }
            acc
        }
        Gate::Mul([a, b]) => match (lower(f, *a)?, lower(f, *b)?) {
            (Part::Zero, _) | (_, Part::Zero) => Part::Zero,
            (Part::Scalar(x), Part::Scalar(y)) => nonzero(x * y),
            (Part::Scalar(x), Part::Program(p)) | (Part::Program(p), Part::Scalar(x)) => {
                Part::Program(p.scale(&x)?)
            }
            (Part::Program(x), Part::Program(y)) => {
                let (first, second) = if x.support().min() <= y.support().min() {
                    (x, y)
                } else {
                    (y, x)
                };
                Part::Program(first.compose_series(&second)?)
            }
        },
    })
}

fn nonzero<F: Scalar>(x: F) -> Part<F> {
    if x.is_zero() {
        Part::Zero
    } else {
        Part::Scalar(x)
    }
}

/// Sizes along the circuit to program pipeline.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LoweringReport {
    pub input_size: usize,
    pub reduced_size: usize,
    pub reduced_depth: usize,
    pub formula_size: usize,
    pub abp_nodes: usize,
    pub abp_edges: usize,
    pub stages: StageLedger,
}

/// Depth reduction, unfolding to a formula, and lowering to a program.
pub fn circuit_to_abp<F: Scalar>(
    circuit: &Circuit<F>,
    limits: &Limits,
) -> Result<(Abp<F>, LoweringReport)> {
    let (reduced, stages) = depth_reduce(circuit, limits)?;
    let formula = circuit_to_formula(&reduced, limits)?;
    let abp = formula_to_abp(&formula)?;
    let report = LoweringReport {
        input_size: circuit.size(),
        reduced_size: reduced.size(),
        reduced_depth: reduced.depth(),
        formula_size: formula.size(),
        abp_nodes: abp.size(),
        abp_edges: abp.edges().len(),
        stages,
    };
    Ok((abp, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Fp31, Var, VariablePartition};

    #[test]
    fn diamond_is_duplicated() {
        let mut b = CircuitBuilder::<Fp31>::new();
        let x = b.input(Var::new(1, 1));
        let y = b.input(Var::new(1, 2));
        let s = b.add(vec![x, y]);
        let z = b.input(Var::new(2, 1));
        let l = b.mul(s, z);
        let w = b.input(Var::new(2, 2));
        let r = b.mul(s, w);
        let top = b.add(vec![l, r]);
        let c = b.finish(VariablePartition::uniform(2, 2), top).unwrap();
        let f = circuit_to_formula(&c, &Limits::default()).unwrap();
        assert_eq!(f.size(), c.size() + 3);
        assert!(f.is_formula());
        let lim = Limits::default();
        assert_eq!(f.expand(&lim).unwrap(), c.expand(&lim).unwrap());
        assert_eq!(formula_to_abp(&c), Err(Error::NotAFormula { gate: 2 }));
        let a = formula_to_abp(&f).unwrap();
        assert_eq!(a.expand(&lim).unwrap(), c.expand(&lim).unwrap());
        let tight = Limits { size: 8, ..lim };
        assert!(matches!(
            circuit_to_formula(&c, &tight),
            Err(Error::SizeCeilingExceeded { .. })
        ));
    }

    #[test]
    fn two_products_have_width_one() {
        let mut b = CircuitBuilder::<Fp31>::new();
        let p: Vec<_> = [(1, 1), (2, 1), (1, 2), (2, 2)]
            .iter()
            .map(|&(i, j)| b.input(Var::new(i, j)))
            .collect();
        let m1 = b.mul(p[0], p[1]);
        let m2 = b.mul(p[3], p[2]);
        let s = b.add(vec![m1, m2]);
        let f = b.finish(VariablePartition::uniform(2, 2), s).unwrap();
        let a = formula_to_abp(&f).unwrap();
        assert_eq!(a.type_width_profile(), vec![1, 1, 1]);
    }

    #[test]
    fn constant_circuit_has_degree_zero() {
        let c = Circuit::<Fp31>::from_topological(
            VariablePartition::uniform(1, 1),
            vec![Gate::Const(Fp31::new(3))],
            0,
        )
        .unwrap();
        assert_eq!(
            circuit_to_abp(&c, &Limits::default()).unwrap_err(),
            Error::DegreeZero
        );
    }
}
