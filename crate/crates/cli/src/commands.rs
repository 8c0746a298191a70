use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use smcirc::circuit::random::{random_circuit, RandomCircuitParams};
use smcirc::generators as gens;
use smcirc::prooftree;
use smcirc::rank;
use smcirc::transforms;
use smcirc::{Error, IndexSet, Polynomial, Result, Scalar, Var, VariablePartition};

use crate::doc::{parse_assignment, Doc, Input, Meta, Output};
use crate::{Cli, Command, EqualMode, GenArgs, GenKind};

pub fn run<F: Scalar>(cli: &Cli) -> Result<String> {
    let g = &cli.global;
    let limits = g.limits();
    let mut meta = Meta::new(&cli.command.name(), g.prime, g.seed);
    meta.params = cli.command.params();

    if let Command::Gen(args) = &cli.command {
        return Ok(generate::<F>(args, g.seed, &mut meta)?.render(meta));
    }
    if let Command::GoodPairs(args) = &cli.command {
        let seed = require_seed(g.seed)?;
        let stats = gens::good_pair_stats(args.d, args.samples, seed)?;
        let report = json!({
            "stats": stats,
            "exact_pair_probability": gens::exact_pair_probability(args.d),
        });
        return Ok(Output::Report(report).render(meta));
    }

    let input = Input::read(g.input.as_deref())?;
    meta.inputs.push(input.digest());
    let doc = Doc::<F>::parse(&input.text)?;

    let out = match &cli.command {
        Command::Gen(_) | Command::GoodPairs(_) => unreachable!(),
        Command::Validate => validate(doc, &limits)?,
        Command::Expand => Output::poly(&doc.expand(&limits)?),
        Command::Eval(a) => {
            let side = Input::read(Some(&a.assign))?;
            meta.inputs.push(side.digest());
            let x = parse_assignment::<F>(&side.text)?;
            Output::report(json!({ "value": doc.evaluate(&x)?.to_string() }))
        }
        Command::Substitute(a) => {
            let side = Input::read(Some(&a.assign))?;
            meta.inputs.push(side.digest());
            let x = parse_assignment::<F>(&side.text)?;
            match doc {
                Doc::Circuit(c) => Output::circuit(&c.substitute(&x)?),
                Doc::Abp(p) => Output::abp(&p.substitute(&x)?),
                Doc::Poly(p) => {
                    let partition = inferred_partition(&p, x.keys())?;
                    Output::poly(&p.substitute(&partition, &x)?)
                }
            }
        }
        Command::Equal(a) => {
            let side = Input::read(Some(&a.against))?;
            meta.inputs.push(side.digest());
            let other = Doc::<F>::parse(&side.text)?;
            match a.mode {
                EqualMode::Exact => {
                    let (p, q) = (doc.expand(&limits)?, other.expand(&limits)?);
                    if p.index_set() != q.index_set() {
                        return Err(Error::IndexSetMismatch {
                            left: p.index_set(),
                            right: q.index_set(),
                        });
                    }
                    Output::report(json!({ "equal": p == q, "mode": "exact" }))
                }
                EqualMode::Random => {
                    let seed = require_seed(g.seed)?;
                    Output::report(random_equal(&doc, &other, a.trials, seed, &limits)?)
                }
            }
        }
        Command::DepthReduce(a) => {
            let (reduced, ledger) = transforms::depth_reduce(&doc.into_circuit()?, &limits)?;
            if a.stats {
                Output::report(ledger)
            } else {
                Output::circuit(&reduced)
            }
        }
        Command::ToFormula => Output::circuit(&transforms::circuit_to_formula(
            &doc.into_circuit()?,
            &limits,
        )?),
        Command::ToAbp => {
            let (abp, report) = transforms::circuit_to_abp(&doc.into_circuit()?, &limits)?;
            meta = meta.with("lowering", report);
            Output::abp(&abp)
        }
        Command::TreeTypes => {
            let types = prooftree::enumerate_tree_types(&doc.into_circuit()?, &limits)?;
            Output::report(json!({ "count": types.len(), "types": types }))
        }
        Command::PropertyU => {
            Output::report(prooftree::check_property_u(&doc.into_circuit()?, &limits)?)
        }
        Command::Decompose => {
            let parts = prooftree::decompose_by_type(&doc.into_circuit()?, &limits)?;
            let components: Vec<Value> = parts
                .iter()
                .map(|(t, c)| json!({ "type": t, "circuit": c.to_json() }))
                .collect();
            Output::report(json!({
                "count": parts.len(),
                "sizes": prooftree::component_sizes(&parts),
                "components": components,
            }))
        }
        Command::Slice(a) => {
            let c = doc.into_circuit()?;
            match &a.index_set {
                Some(s) => Output::circuit(&prooftree::slice_by_index_set(&c, parse_set(s)?)?),
                None => {
                    let check = prooftree::check_slice_partition(&c, &limits)?;
                    let partition = check.is_partition();
                    Output::report(json!({ "partition": partition, "check": check }))
                }
            }
        }
        Command::UniqueToFormula => Output::circuit(&prooftree::unique_type_to_formula(
            &doc.into_circuit()?,
            &limits,
        )?),
        Command::Rank(a) => {
            let witness = a.abp_witness || (a.order.is_none() && matches!(doc, Doc::Abp(_)));
            if witness {
                Output::report(rank::witness_rank_report(&doc.into_abp()?, &limits)?)
            } else {
                let f = doc.expand(&limits)?;
                let partition = match doc.partition() {
                    Some(p) => p.clone(),
                    None => inferred_partition(&f, std::iter::empty())?,
                };
                let order = match &a.order {
                    Some(s) => parse_list(s)?,
                    None => f.index_set().to_vec(),
                };
                Output::report(rank::fixed_order_rank_report(&f, &partition, &order)?)
            }
        }
        Command::TypeWidth => {
            let abp = doc.into_abp()?;
            let profile = abp.type_width_profile();
            let max = profile.iter().copied().max().unwrap_or(0);
            Output::report(json!({ "profile": profile, "max": max }))
        }
        Command::Narrow(a) => {
            let abp = doc.into_abp()?;
            let narrow = abp.is_w_narrow(a.w, a.threshold)?;
            let layer = abp.degree() - a.w;
            Output::report(json!({
                "narrow": narrow,
                "layer": layer,
                "type_width": abp.type_width(layer)?,
            }))
        }
        Command::RoabpDetect => {
            let order = doc.into_abp()?.detect_roabp();
            Output::report(json!({ "roabp": order.is_some(), "order": order }))
        }
        Command::IntervalCheck(a) => {
            let order = parse_list(&a.order)?;
            let c = match doc {
                Doc::Abp(p) => p.to_circuit()?,
                other => other.into_circuit()?,
            };
            Output::report(c.is_interval_multilinear(&order)?)
        }
    };
    Ok(out.render(meta))
}

fn require_seed(seed: Option<u64>) -> Result<u64> {
    seed.ok_or_else(|| Error::Schema("this command needs --seed".into()))
}

fn missing(flag: &str) -> Error {
    Error::PreconditionViolated(format!("missing --{flag}"))
}

fn generate<F: Scalar>(a: &GenArgs, seed: Option<u64>, meta: &mut Meta) -> Result<Output> {
    let n = || a.n.ok_or_else(|| missing("n"));
    let d = || a.d.ok_or_else(|| missing("d"));
    Ok(match a.kind {
        GenKind::Per => Output::circuit(&gens::permanent::<F>(n()?)?),
        GenKind::Det => Output::circuit(&gens::determinant::<F>(n()?)?),
        GenKind::PerRoabp => Output::abp(&gens::matrix_roabp::<F>(n()?, false)?),
        GenKind::DetRoabp => Output::abp(&gens::matrix_roabp::<F>(n()?, true)?),
        GenKind::SigmaP | GenKind::SigmaPAbp => {
            let d = d()?;
            let sigma = match a.sigma.as_str() {
                "identity" => gens::identity(2 * d),
                "random" => gens::random_permutations(2 * d, 1, require_seed(seed)?).remove(0),
                s => parse_list(s)?,
            };
            meta.extra.insert("sigma".into(), json!(sigma));
            if a.kind == GenKind::SigmaP {
                Output::poly(&gens::sigma_p::<F>(d, &sigma)?)
            } else {
                Output::abp(&gens::sigma_p_abp::<F>(d, &sigma)?)
            }
        }
        GenKind::InterpF => {
            let d = d()?;
            let sigmas = match &a.sigmas {
                Some(s) => s.split(';').map(parse_list).collect::<Result<Vec<_>>>()?,
                None => gens::random_permutations(2 * d, a.count, require_seed(seed)?),
            };
            meta.extra.insert("sigmas".into(), json!(sigmas));
            Output::abp(&gens::interpolated_f::<F>(d, &sigmas)?)
        }
        GenKind::Blockdiag => {
            let r =
                gens::block_diagonal_restriction::<F>(n()?, a.nu.ok_or_else(|| missing("nu"))?)?;
            Output::report(r)
        }
        GenKind::Random => {
            let d = d()?;
            if d == 0 || d > 16 || a.max_bucket == 0 || a.max_gates == 0 {
                return Err(Error::ScaleExceeded(format!(
                    "random circuits need 1 ≤ d ≤ 16, got {d}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(require_seed(seed)?);
            let params = RandomCircuitParams {
                max_bucket_size: a.max_bucket,
                max_gates: a.max_gates.max(2 * d as usize),
                ..RandomCircuitParams::new(d)
            };
            Output::circuit(&random_circuit::<F, _>(&mut rng, &params))
        }
    })
}

fn validate<F: Scalar>(doc: Doc<F>, limits: &smcirc::Limits) -> Result<Output> {
    Ok(match doc {
        Doc::Circuit(c) => {
            let ann = c.validate(limits)?;
            if let Some(&gate) = ann.redundant_gates.as_ref().and_then(|r| r.first()) {
                return Err(Error::RedundantGate { gate });
            }
            Output::report(json!({ "valid": true, "kind": "circuit", "annotation": ann }))
        }
        Doc::Abp(a) => Output::report(json!({
            "valid": true,
            "kind": "abp",
            "degree": a.degree(),
            "support": a.support(),
            "nodes": a.size(),
            "edges": a.edges().len(),
            "type_width_profile": a.type_width_profile(),
        })),
        Doc::Poly(p) => Output::report(json!({
            "valid": true,
            "kind": "polynomial",
            "index_set": p.index_set(),
            "terms": p.len(),
        })),
    })
}

/// Compares values at `trials` random points. A difference proves the two
/// sides differ; agreement everywhere leaves an error probability of at most
/// `(d·n/p)^trials`, with `n` the largest bucket.
fn random_equal<F: Scalar>(
    left: &Doc<F>,
    right: &Doc<F>,
    trials: u32,
    seed: u64,
    limits: &smcirc::Limits,
) -> Result<Value> {
    let (l, r) = (output_set(left, limits)?, output_set(right, limits)?);
    if l != r {
        return Err(Error::IndexSetMismatch { left: l, right: r });
    }
    let vars: BTreeSet<Var> = left
        .variables()
        .union(&right.variables())
        .copied()
        .collect();
    let p = F::characteristic();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut equal = true;
    for _ in 0..trials {
        let x: BTreeMap<Var, F> = vars
            .iter()
            .map(|&v| (v, F::from_u64(rng.gen_range(0..p)).expect("residue embeds")))
            .collect();
        if left.evaluate(&x)? != right.evaluate(&x)? {
            equal = false;
            break;
        }
    }
    let width = vars.iter().map(|v| v.col).max().unwrap_or(1) as f64;
    let per_trial = (l.len() as f64 * width / p as f64).min(1.0);
    Ok(json!({
        "equal": equal,
        "mode": "random",
        "trials": trials,
        "error_bound": if equal { per_trial.powi(trials as i32) } else { 0.0 },
    }))
}

fn output_set<F: Scalar>(doc: &Doc<F>, limits: &smcirc::Limits) -> Result<IndexSet> {
    match doc {
        Doc::Circuit(c) => c.output_index_set(),
        Doc::Abp(a) => Ok(a.support()),
        Doc::Poly(_) => Ok(doc.expand(limits)?.index_set()),
    }
}

/// Smallest partition holding every variable of `p` and of `extra`.
fn inferred_partition<'a, F: Scalar>(
    p: &'a Polynomial<F>,
    extra: impl Iterator<Item = &'a Var>,
) -> Result<VariablePartition> {
    let mut sizes: BTreeMap<u32, u32> = p.index_set().iter().map(|b| (b, 1)).collect();
    for v in p.terms().flat_map(|(m, _)| m.vars().iter()).chain(extra) {
        let e = sizes.entry(v.bucket).or_insert(1);
        *e = (*e).max(v.col);
    }
    let top = sizes.keys().next_back().copied().unwrap_or(0);
    VariablePartition::new(
        (1..=top)
            .map(|b| sizes.get(&b).copied().unwrap_or(1))
            .collect(),
    )
}

fn parse_list(s: &str) -> Result<Vec<u32>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<u32>()
                .map_err(|_| Error::Schema(format!("not a bucket number: {t:?}")))
        })
        .collect()
}

fn parse_set(s: &str) -> Result<IndexSet> {
    let buckets = parse_list(s)?;
    if buckets.iter().any(|&b| b == 0 || b > 64) {
        return Err(Error::Schema(format!("bucket out of range in {s:?}")));
    }
    Ok(buckets.into_iter().collect())
}
