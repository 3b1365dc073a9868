use std::fmt::Write as _;
use std::path::Path;

use scottrank::equivalence::{compute_family, is_ultrahomogeneous, EngineLimits};
use scottrank::gromov::{compare_dn, dn_set, ep_equivalent, epsilon_net, find_isometric_embedding, GromovLimits};
use scottrank::tree::{build_tree, tree_function_structure, tree_metric_space, BuildLimits};
use scottrank::{dedupe_reduce, DistanceMatrix, FiniteMetricSpace, TreeSpec};
use serde_json::{json, Value};

use crate::input::{self, parse_tuple, Input, InputDigest};
use crate::{Cli, Command, EmitArg, Failure, Outcome};

/// Classes-table length when `--max-n` is absent and the carrier is too
/// large for full refinement.
const DEFAULT_TABLE_LENGTH: usize = 2;

pub fn run(cli: &Cli, inputs: &mut Vec<InputDigest>) -> Result<Outcome, Failure> {
    let limits = EngineLimits {
        max_tuples: cli.max_tuples,
        max_sets: cli.max_sets,
    };
    let mut load = |path: &Path| -> Result<Input, Failure> {
        match input::load(path) {
            Ok(i) => {
                inputs.push(i.digest.clone());
                Ok(i)
            }
            Err(e) => {
                if let input::LoadError::Parse(_, d, _) = &e {
                    inputs.push(d.clone());
                }
                Err(e.into())
            }
        }
    };
    match &cli.command {
        Command::Rank { file, view, max_n } => {
            let input = load(file)?;
            let view = input.view(*view)?;
            let n = view.len();
            let len = match max_n {
                Some(k) => *k,
                None if limits.fits_refinement(n) => n,
                None => DEFAULT_TABLE_LENGTH,
            };
            let fam = compute_family(&view, len.max(1), limits)?;
            let rank = fam.stabilization();
            let counts = fam.class_counts();
            let mut text = format!("rank {rank}\n");
            writeln!(text, "# classes of injective tuples, length 0..={}", fam.max_length()).unwrap();
            for (level, row) in counts.iter().enumerate() {
                let cells: Vec<String> = row.iter().map(usize::to_string).collect();
                writeln!(text, "level {level}: {}", cells.join(" ")).unwrap();
            }
            Ok(Outcome {
                text,
                notes: vec![format!("{} points, {:?} engine", n, fam.method()).to_lowercase()],
                result: json!({
                    "rank": rank,
                    "view": view.kind(),
                    "points": n,
                    "method": fam.method(),
                    "max_length": fam.max_length(),
                    "classes": counts,
                }),
                verdict: None,
            })
        }
        Command::Equiv { file, a, b, alpha, view } => {
            let input = load(file)?;
            let view = input.view(*view)?;
            let ta = parse_tuple(a, view.labels())?;
            let tb = parse_tuple(b, view.labels())?;
            if ta.len() != tb.len() {
                return Err(scottrank::Error::LengthMismatch(ta.len(), tb.len()).into());
            }
            let support = dedupe_reduce(&ta).0.len().max(dedupe_reduce(&tb).0.len()).max(1);
            let fam = compute_family(&view, support, limits)?;
            // Every level from the stabilization on is the same relation, so
            // any infinite alpha reads that level.
            let level = match alpha.as_finite() {
                Some(k) => usize::try_from(k).unwrap_or(usize::MAX).min(fam.stabilization()),
                None => fam.stabilization(),
            };
            let equivalent = fam.are_equivalent(&ta, &tb, level)?;
            let names = |t: &[usize]| t.iter().map(|&i| view.labels()[i].clone()).collect::<Vec<_>>();
            Ok(Outcome {
                text: format!("{equivalent}\n"),
                notes: vec![format!("level {level} of {}", fam.stabilization())],
                result: json!({
                    "equivalent": equivalent,
                    "alpha": alpha.to_string(),
                    "a": names(&ta),
                    "b": names(&tb),
                    "level_used": level,
                    "stabilization": fam.stabilization(),
                }),
                verdict: Some(equivalent),
            })
        }
        Command::Homogeneous { file } => {
            let space = load(file)?.space();
            let h = is_ultrahomogeneous(&space, limits.max_sets)?;
            let witness = h.witness.as_ref().map(|w| pairs(&space, &w.domain, &space, &w.image));
            let mut text = format!("{}\n", h.homogeneous);
            if let Some(w) = &witness {
                text.push_str("# partial isometry with no extension\n");
                text.push_str(&render_pairs(w));
            }
            Ok(Outcome {
                text,
                notes: vec![],
                result: json!({ "homogeneous": h.homogeneous, "witness": witness }),
                verdict: Some(h.homogeneous),
            })
        }
        Command::Isometric { x, y } => {
            let (x, y) = (load(x)?.space(), load(y)?.space());
            let map = if x.len() == y.len() {
                find_isometric_embedding(&x, &y, &[], &[])?
            } else {
                None
            };
            let mapping = map.map(|e| pairs(&x, &(0..x.len()).collect::<Vec<_>>(), &y, &e.map));
            let mut text = format!("{}\n", mapping.is_some());
            if let Some(m) = &mapping {
                text.push_str(&render_pairs(m));
            }
            Ok(Outcome {
                text,
                notes: vec![],
                result: json!({ "isometric": mapping.is_some(), "mapping": mapping }),
                verdict: Some(mapping.is_some()),
            })
        }
        Command::Dnset { file, max_n } => {
            let space = load(file)?.space();
            let set = dn_set(&space, *max_n, GromovLimits::default())?;
            let matrices: Vec<Value> = set.matrices().iter().map(matrix_json).collect();
            Ok(Outcome {
                text: set.to_text_blocks(),
                notes: vec![format!("{} distinct matrices of order {}", set.len(), set.order())],
                result: json!({ "order": set.order(), "count": set.len(), "matrices": matrices }),
                verdict: None,
            })
        }
        Command::CompareDn { x, y, max_n, eps, anchor_x, anchor_y } => {
            let (x, y) = (load(x)?.space(), load(y)?.space());
            match eps {
                None => {
                    let cmp = compare_dn(&x, &y, *max_n, GromovLimits::default())?;
                    let mut text = format!("{}\n", cmp.equal);
                    let diff = cmp.first_difference.as_ref().map(|d| {
                        let side = format!("{:?}", d.only_in).to_lowercase();
                        write!(text, "# first difference at n={}, only in {side}\n{}", d.n, d.matrix).unwrap();
                        json!({ "n": d.n, "only_in": side, "matrix": matrix_json(&d.matrix) })
                    });
                    Ok(Outcome {
                        text,
                        notes: vec![],
                        result: json!({ "mode": "dn", "max_n": max_n, "equal": cmp.equal, "first_difference": diff }),
                        verdict: Some(cmp.equal),
                    })
                }
                Some(eps) => {
                    let ax = parse_tuple(anchor_x, x.labels())?;
                    let ay = parse_tuple(anchor_y, y.labels())?;
                    let mut failing = None;
                    for n in 0..=*max_n {
                        if !ep_equivalent(&x, &ax, &y, &ay, n, eps, GromovLimits::default())? {
                            failing = Some(n);
                            break;
                        }
                    }
                    let equivalent = failing.is_none();
                    let mut text = format!("{equivalent}\n");
                    if let Some(n) = failing {
                        writeln!(text, "# first failure with {n} free points").unwrap();
                    }
                    Ok(Outcome {
                        text,
                        notes: vec![],
                        result: json!({
                            "mode": "eps",
                            "eps": eps.to_string(),
                            "max_n": max_n,
                            "equivalent": equivalent,
                            "first_failure": failing,
                        }),
                        verdict: Some(equivalent),
                    })
                }
            }
        }
        Command::Tree { n, alpha, cap, depth_cap, emit } => {
            let spec = TreeSpec {
                n: *n,
                alpha: alpha.clone(),
                cap: *cap,
                depth_cap: *depth_cap,
            };
            let tree = build_tree(&spec, BuildLimits { max_nodes: cli.max_nodes })?;
            let claim = alpha.times_omega().to_string();
            let text = match emit {
                EmitArg::Nodes => tree.to_nodes_string(),
                EmitArg::Space => tree_metric_space(&tree).to_file_string(),
                EmitArg::Function => {
                    let view = tree_function_structure(&tree);
                    let parent = view.parent().expect("function view");
                    let labels = view.labels();
                    labels
                        .iter()
                        .zip(parent)
                        .map(|(l, &p)| format!("{l} {}\n", labels[p]))
                        .collect()
                }
            };
            Ok(Outcome {
                notes: vec![
                    format!("{} nodes", tree.len()),
                    format!("claimed rank of the untruncated tree: {claim}"),
                ],
                result: json!({
                    "n": n.to_string(),
                    "alpha": alpha.to_string(),
                    "cap": cap,
                    "depth_cap": depth_cap,
                    "nodes": tree.len(),
                    "emit": emit,
                    "claimed_rank_untruncated": claim,
                    "output": text,
                }),
                text,
                verdict: None,
            })
        }
        Command::Epsnet { file, eps } => {
            let space = load(file)?.space();
            let net = epsilon_net(&space, eps)?;
            let labels: Vec<&str> = net.iter().map(|&i| space.labels()[i].as_str()).collect();
            Ok(Outcome {
                text: labels.iter().map(|l| format!("{l}\n")).collect(),
                notes: vec![format!("{} of {} points", net.len(), space.len())],
                result: json!({ "eps": eps.to_string(), "net": labels, "indices": net }),
                verdict: None,
            })
        }
    }
}

fn pairs(x: &FiniteMetricSpace, from: &[usize], y: &FiniteMetricSpace, to: &[usize]) -> Vec<[String; 2]> {
    from.iter()
        .zip(to)
        .map(|(&a, &b)| [x.labels()[a].clone(), y.labels()[b].clone()])
        .collect()
}

fn render_pairs(p: &[[String; 2]]) -> String {
    p.iter().map(|[a, b]| format!("{a} -> {b}\n")).collect()
}

fn matrix_json(m: &DistanceMatrix) -> Value {
    let rows: Vec<Vec<String>> = m
        .rows()
        .iter()
        .map(|r| r.iter().map(|q| q.to_string()).collect())
        .collect();
    json!(rows)
}
