//! Gate derivatives by expansion, product frontiers, and the two frontier
//! identities used by depth reduction.

use serde::Serialize;

use crate::algebra::field::Scalar;
use crate::algebra::poly::Polynomial;
use crate::circuit::{Circuit, Gate, GateId};
use crate::error::{Error, Result};
use crate::Limits;

/// Product gates of degree above `m` whose two children have degree at most `m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GateFrontier {
    pub m: usize,
    pub gates: Vec<GateId>,
}

/// The frontier at threshold `m`, in gate-id order.
pub fn gate_frontier<F: Scalar>(circuit: &Circuit<F>, m: usize) -> Result<GateFrontier> {
    let sets = circuit.index_sets()?;
    let deg = |g: GateId| sets[g].len();
    let gates = circuit
        .gates()
        .iter()
        .enumerate()
        .filter_map(|(id, g)| match g {
            Gate::Mul([a, b]) if deg(id) > m && deg(*a) <= m && deg(*b) <= m => Some(id),
            _ => None,
        })
        .collect();
    Ok(GateFrontier { m, gates })
}

/// The derivative of gate `v` with respect to gate `w`.
///
/// Gate `w` is replaced by a fresh variable `y`; every gate is expanded as
/// `p0 + y * p1` with higher powers of `y` discarded, and `p1` at `v` is
/// returned. Its index set is `I_v \ I_w`.
pub fn partial_derivative<F: Scalar>(
    circuit: &Circuit<F>,
    v: GateId,
    w: GateId,
    limits: &Limits,
) -> Result<Polynomial<F>> {
    circuit.gate(v)?;
    circuit.gate(w)?;
    let sets = circuit.index_sets()?;
    let target = sets[v].difference(sets[w]);
    if w > v {
        return Ok(Polynomial::zero(target));
    }
    let mut base: Vec<Polynomial<F>> = Vec::with_capacity(v + 1);
    let mut lin: Vec<Option<Polynomial<F>>> = Vec::with_capacity(v + 1);
    for (id, g) in circuit.gates()[..=v].iter().enumerate() {
        let (p0, p1) = if id == w {
            (
                Polynomial::zero(sets[id]),
                Some(Polynomial::constant(F::one())),
            )
        } else {
            match g {
                Gate::Input(x) => (Polynomial::var(*x), None),
                Gate::Const(c) => (Polynomial::constant(c.clone()), None),
                Gate::Add(args) => {
                    let mut p0 = base[args[0]].clone();
                    for &a in &args[1..] {
                        p0.add_assign(&base[a])?;
                    }
                    let mut p1: Option<Polynomial<F>> = None;
                    for &a in args {
                        if let Some(q) = &lin[a] {
                            match &mut p1 {
                                Some(acc) => acc.add_assign(q)?,
                                None => p1 = Some(q.clone()),
                            }
                        }
                    }
                    (p0, p1)
                }
                Gate::Mul([a, b]) => {
                    let p0 = base[*a].mul_limited(&base[*b], limits)?;
                    let left = lin[*a]
                        .as_ref()
                        .map(|q| q.mul_limited(&base[*b], limits))
                        .transpose()?;
                    let right = lin[*b]
                        .as_ref()
                        .map(|q| base[*a].mul_limited(q, limits))
                        .transpose()?;
                    let p1 = match (left, right) {
                        (Some(mut l), Some(r)) => {
                            l.add_assign(&r)?;
                            Some(l)
                        }
                        (l, r) => l.or(r),
                    };
                    (p0, p1)
                }
            }
        };
        base.push(p0);
        lin.push(p1);
    }
    Ok(lin
        .pop()
        .flatten()
        .unwrap_or_else(|| Polynomial::zero(target)))
}

/// Checks `f_v = Σ_{t ∈ G_m} f_t · ∂_t f_v` by expansion.
pub fn check_frontier_expansion<F: Scalar>(
    circuit: &Circuit<F>,
    v: GateId,
    m: usize,
    limits: &Limits,
) -> Result<bool> {
    circuit.gate(v)?;
    let sets = circuit.index_sets()?;
    let dv = sets[v].len();
    if !(m < dv && dv <= 2 * m) {
        return Err(Error::PreconditionViolated(format!(
            "need m < deg(v) <= 2m, got m = {m}, deg(v) = {dv}"
        )));
    }
    let polys = circuit.expand_all(limits)?;
    let mut rhs = Polynomial::zero(sets[v]);
    for t in gate_frontier(circuit, m)?.gates {
        let dt = partial_derivative(circuit, v, t, limits)?;
        if !dt.is_zero() {
            rhs.add_assign(&polys[t].mul_limited(&dt, limits)?)?;
        }
    }
    Ok(rhs == polys[v])
}

/// Checks `∂_w f_v = Σ_{t ∈ G_m} ∂_w f_t · ∂_t f_v` by expansion.
pub fn check_derivative_expansion<F: Scalar>(
    circuit: &Circuit<F>,
    v: GateId,
    w: GateId,
    m: usize,
    limits: &Limits,
) -> Result<bool> {
    circuit.gate(v)?;
    circuit.gate(w)?;
    let sets = circuit.index_sets()?;
    let (dv, dw) = (sets[v].len(), sets[w].len());
    let failed = if dw == 0 {
        Some("0 < deg(w)")
    } else if dw > m {
        Some("deg(w) <= m")
    } else if m >= dv {
        Some("m < deg(v)")
    } else if dv >= 2 * dw {
        Some("deg(v) < 2 deg(w)")
    } else {
        None
    };
    if let Some(what) = failed {
        return Err(Error::PreconditionViolated(format!(
            "need {what}, got m = {m}, deg(v) = {dv}, deg(w) = {dw}"
        )));
    }
    let lhs = partial_derivative(circuit, v, w, limits)?;
    let mut rhs = Polynomial::zero(sets[v].difference(sets[w]));
    for t in gate_frontier(circuit, m)?.gates {
        let dt = partial_derivative(circuit, v, t, limits)?;
        if dt.is_zero() {
            continue;
        }
        let wt = partial_derivative(circuit, t, w, limits)?;
        if !wt.is_zero() {
            rhs.add_assign(&wt.mul_limited(&dt, limits)?)?;
        }
    }
    Ok(rhs == lhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::{Fp31, Var, VariablePartition};

    fn balanced4() -> Circuit<Fp31> {
        let mut b = CircuitBuilder::new();
        let x: Vec<_> = (1..=4).map(|i| b.input(Var::new(i, 1))).collect();
        let l = b.mul(x[0], x[1]);
        let r = b.mul(x[2], x[3]);
        let top = b.mul(l, r);
        b.finish(VariablePartition::uniform(4, 1), top).unwrap()
    }

    #[test]
    fn frontier_of_balanced_tree() {
        let c = balanced4();
        assert_eq!(gate_frontier(&c, 2).unwrap().gates, vec![6]);
        assert_eq!(gate_frontier(&c, 1).unwrap().gates, vec![4, 5]);
        assert!(gate_frontier(&c, 4).unwrap().gates.is_empty());
    }

    #[test]
    fn derivative_basics() {
        let c = balanced4();
        let lim = Limits::default();
        assert_eq!(
            partial_derivative(&c, 6, 6, &lim).unwrap(),
            Polynomial::constant(Fp31::new(1))
        );
        let d = partial_derivative(&c, 6, 4, &lim).unwrap();
        assert_eq!(
            d,
            Polynomial::var(Var::new(3, 1))
                .mul(&Polynomial::var(Var::new(4, 1)))
                .unwrap()
        );
        assert!(partial_derivative(&c, 4, 2, &lim).unwrap().is_zero());
        assert!(check_frontier_expansion(&c, 6, 2, &lim).unwrap());
        assert!(matches!(
            check_frontier_expansion(&c, 6, 1, &lim),
            Err(Error::PreconditionViolated(_))
        ));
    }
}
