use crate::abp::{Abp, Edge, Node};
use crate::algebra::field::Scalar;
use crate::algebra::index_set::IndexSet;
use crate::algebra::poly::{Monomial, Polynomial, Var, VariablePartition};
use crate::circuit::check_permutation;
use crate::error::{Error, Result};

/// Largest half-degree for the matched-pair polynomial.
pub const MAX_HALF_DEGREE: u32 = 12;
/// Largest degree for the interpolated family.
pub const MAX_INTERPOLATED: u32 = 8;

fn check_sigma(d: u32, sigma: &[u32]) -> Result<()> {
    if d == 0 || d > MAX_HALF_DEGREE {
        return Err(Error::ScaleExceeded(format!(
            "half-degree {d} is outside 1..={MAX_HALF_DEGREE}"
        )));
    }
    if sigma.len() != 2 * d as usize {
        return Err(Error::InvalidPermutation(2 * d as usize));
    }
    check_permutation(sigma)
}

/// `1, 2, ..., n`.
pub fn identity(n: u32) -> Vec<u32> {
    (1..=n).collect()
}

/// Variable `x_{bit, bucket}`; columns are `1` for bit 0 and `2` for bit 1.
fn bit_var(bit: u32, bucket: u32) -> Var {
    Var::new(bucket, bit + 1)
}

/// `Σ_b Π_i x_{b_i, σ(i)} x_{b_i, σ(d+i)}` over all `b ∈ {0,1}^d`, on `2d`
/// buckets of size two.
pub fn sigma_p<F: Scalar>(d: u32, sigma: &[u32]) -> Result<Polynomial<F>> {
    check_sigma(d, sigma)?;
    let du = d as usize;
    let terms = (0u32..1 << d).map(|b| {
        let vars = (0..du)
            .flat_map(|i| {
                let bit = (b >> (du - 1 - i)) & 1;
                [bit_var(bit, sigma[i]), bit_var(bit, sigma[du + i])]
            })
            .collect();
        (
            Monomial::from_vars(vars).expect("distinct buckets"),
            F::one(),
        )
    });
    Polynomial::from_terms(IndexSet::full(2 * d), terms)
}

/// Layered program for [`sigma_p`] with `3d + 1` nodes.
///
/// Layer `2i` has one node; from it two parallel paths, one per bit, read
/// `x_{b, σ(i+1)}` then `x_{b, σ(d+i+1)}` and meet again on layer `2i + 2`.
pub fn sigma_p_abp<F: Scalar>(d: u32, sigma: &[u32]) -> Result<Abp<F>> {
    check_sigma(d, sigma)?;
    let partition = VariablePartition::uniform(2 * d, 2);
    let (nodes, edges) = matched_pair_layers(d, sigma, 0, IndexSet::EMPTY);
    Abp::new(partition, nodes, edges)
}

/// Nodes and edges of the matched-pair program starting at `layer0` with
/// index set `base`. Node `0` of the result is the start node.
fn matched_pair_layers<F: Scalar>(
    d: u32,
    sigma: &[u32],
    layer0: usize,
    base: IndexSet,
) -> (Vec<Node>, Vec<Edge<F>>) {
    let du = d as usize;
    let mut nodes = vec![Node {
        layer: layer0,
        index_set: base,
    }];
    let mut edges = Vec::new();
    let mut hub = 0;
    let mut set = base;
    for i in 0..du {
        let (a, b) = (sigma[i], sigma[du + i]);
        let mid = set.union(IndexSet::singleton(a));
        let next = mid.union(IndexSet::singleton(b));
        let layer = layer0 + 2 * i;
        let first = nodes.len();
        nodes.push(Node {
            layer: layer + 1,
            index_set: mid,
        });
        nodes.push(Node {
            layer: layer + 1,
            index_set: mid,
        });
        nodes.push(Node {
            layer: layer + 2,
            index_set: next,
        });
        for bit in 0..2 {
            let m = first + bit as usize;
            edges.push(Edge::var(hub, m, bit_var(bit, a)));
            edges.push(Edge::var(m, first + 2, bit_var(bit, b)));
        }
        hub = first + 2;
        set = next;
    }
    (nodes, edges)
}

/// `Σ_c u_c · σ_c(P)` where `u_c` reads the bits of `c` (most significant
/// first) from the selector buckets `2d+1..=2d+log d`.
///
/// Each branch is a selector path followed by the matched-pair program for
/// `σ_c`; the branches share only the source and the sink.
pub fn interpolated_f<F: Scalar>(d: u32, sigmas: &[Vec<u32>]) -> Result<Abp<F>> {
    if !d.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(d));
    }
    if d > MAX_INTERPOLATED {
        return Err(Error::ScaleExceeded(format!(
            "degree {d} exceeds {MAX_INTERPOLATED}"
        )));
    }
    if sigmas.len() != d as usize {
        return Err(Error::PreconditionViolated(format!(
            "expected {d} permutations, got {}",
            sigmas.len()
        )));
    }
    let log = d.trailing_zeros();
    let partition = VariablePartition::uniform(2 * d + log, 2);
    let mut program: Option<Abp<F>> = None;
    for (c, sigma) in sigmas.iter().enumerate() {
        check_sigma(d, sigma)?;
        let mut nodes = vec![Node {
            layer: 0,
            index_set: IndexSet::EMPTY,
        }];
        let mut edges = Vec::new();
        let mut set = IndexSet::EMPTY;
        for j in 0..log {
            let bucket = 2 * d + 1 + j;
            let bit = (c as u32 >> (log - 1 - j)) & 1;
            set.insert(bucket);
            nodes.push(Node {
                layer: j as usize + 1,
                index_set: set,
            });
            edges.push(Edge::var(j as usize, j as usize + 1, bit_var(bit, bucket)));
        }
        let offset = nodes.len() - 1;
        let (body_nodes, body_edges) = matched_pair_layers::<F>(d, sigma, log as usize, set);
        nodes.extend(body_nodes.into_iter().skip(1));
        edges.extend(body_edges.into_iter().map(|e| Edge {
            from: e.from + offset,
            to: e.to + offset,
            ..e
        }));
        let branch = Abp::new(partition.clone(), nodes, edges)?;
        program = Some(match program {
            None => branch,
            Some(p) => p.compose_parallel(&branch)?,
        });
    }
    Ok(program.expect("at least one branch"))
}

/// Assignment fixing the selector buckets of [`interpolated_f`] to the
/// bits of `c`.
pub fn selector_assignment<F: Scalar>(d: u32, c: u32) -> std::collections::BTreeMap<Var, F> {
    let log = d.trailing_zeros();
    (0..log)
        .flat_map(|j| {
            let bucket = 2 * d + 1 + j;
            let bit = (c >> (log - 1 - j)) & 1;
            [
                (bit_var(bit, bucket), F::one()),
                (bit_var(1 - bit, bucket), F::zero()),
            ]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Fp31, Limits};

    #[test]
    fn d1_identity() {
        let p = sigma_p::<Fp31>(1, &[1, 2]).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(
            p.coeff(&Monomial::from_vars(vec![Var::new(1, 2), Var::new(2, 2)]).unwrap()),
            Fp31::new(1)
        );
        let a = sigma_p_abp::<Fp31>(1, &[1, 2]).unwrap();
        assert_eq!(a.size(), 4);
        assert_eq!(a.expand(&Limits::default()).unwrap(), p);
    }

    #[test]
    fn program_reads_matched_pairs_in_order() {
        let sigma = [3, 1, 6, 2, 5, 4];
        let a = sigma_p_abp::<Fp31>(3, &sigma).unwrap();
        assert_eq!(a.size(), 10);
        assert_eq!(a.detect_roabp(), Some(vec![3, 2, 1, 5, 6, 4]));
        assert_eq!(
            a.expand(&Limits::default()).unwrap(),
            sigma_p(3, &sigma).unwrap()
        );
        assert!(matches!(
            sigma_p::<Fp31>(2, &[1, 1, 2, 3]),
            Err(Error::InvalidPermutation(4))
        ));
    }

    #[test]
    fn selectors_recover_branches() {
        let lim = Limits::default();
        let sigmas = vec![identity(4), vec![4, 3, 2, 1]];
        let f = interpolated_f::<Fp31>(2, &sigmas).unwrap();
        assert_eq!(f.size(), 2 + 2 * (1 + 3 * 2 - 1));
        for (c, s) in sigmas.iter().enumerate() {
            let r = f
                .substitute(&selector_assignment(2, c as u32))
                .unwrap()
                .expand(&lim)
                .unwrap();
            assert_eq!(r, sigma_p::<Fp31>(2, s).unwrap());
        }
        assert_eq!(
            interpolated_f::<Fp31>(3, &[]).unwrap_err(),
            Error::NotPowerOfTwo(3)
        );
    }
}
