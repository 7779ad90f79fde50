use std::path::Path;

use commbound::approx::{approx_degree, dual_polynomial, verify_dual};
use commbound::boolfn::BoolFunction;
use commbound::bounds::{
    disc_bound, gamma2_star_interval, shaltiel_verify, sherstov_bound, shizhu_bound, BoundReport,
};
use commbound::composer::{build_witness, compose_block, verify_orthogonality, verify_rank_theorem};
use commbound::group::{
    block_group_bound, characters_abelian, degeneration_check, distance_to_easy, dual_h,
    general_bound, orthogonality_general, pair_multisets, line_regular_search, product_table,
    regularity_check, tprime_check, CharacterTable, GroupMapMatrix, HardnessPartition,
};
use commbound::matrix::{
    balance_check, contains_pattern, enumerate_strongly_balanced, exact_rank,
    search_strongly_balanced, DistributionMatrix, PatternMode, SearchConstraints, SignMatrix,
    Spectral,
};
use commbound::suites::run_all;
use commbound::{Error, Result};
use serde_json::{json, Value};

use crate::args::{
    AnalyzeArgs, ApproxArgs, Command, ComposeArgs, GroupArgs, LowerBoundArgs, SearchArgs, Source,
    SuiteArgs, Theorem,
};

pub struct Outcome {
    pub result: Value,
    /// False for inapplicable or vacuous results.
    pub ok: bool,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialise")
}

fn read(path: &Path) -> Result<String> {
    Ok(std::fs::read_to_string(path)?)
}

fn load_matrix(src: &Source) -> Result<SignMatrix> {
    match src {
        Source::Builtin(name) => SignMatrix::builtin(name)
            .ok_or_else(|| Error::Argument(format!("unknown built-in matrix `{name}`"))),
        Source::File(p) => SignMatrix::parse(&read(p)?),
    }
}

fn load_function(src: &Source) -> Result<BoolFunction> {
    match src {
        Source::Builtin(spec) => BoolFunction::builtin(spec),
        Source::File(p) => BoolFunction::parse(&read(p)?),
    }
}

fn matrix_rows(m: &SignMatrix) -> Vec<String> {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|&v| if v < 0 { '-' } else { '+' }).collect())
        .collect()
}

pub fn run(cmd: &Command) -> Result<Outcome> {
    match cmd {
        Command::AnalyzeMatrix(a) => analyze(a),
        Command::ApproxDegree(a) => approx(a),
        Command::Compose(a) => compose(a),
        Command::LowerBound(a) => lower_bound(a),
        Command::GroupCheck(a) => group(a),
        Command::SearchBalanced(a) => search(a),
        Command::VerifySuite(a) => suite(a),
    }
}

fn analyze(a: &AnalyzeArgs) -> Result<Outcome> {
    let m = load_matrix(&a.input)?;
    let balance = balance_check(&m);
    let spectrum = m.spectrum(a.tolerance)?;
    let (s4_free, s4_free_ordered) = if m.rows() >= 4 && m.cols() >= 4 {
        (
            contains_pattern(&m, &SignMatrix::s4(), PatternMode::UpToPermutation)?.is_none(),
            contains_pattern(&m, &SignMatrix::s4(), PatternMode::Ordered)?.is_none(),
        )
    } else {
        (true, true)
    };
    let mut warnings = Vec::new();
    let (shaltiel, gamma2) = if m.rows().min(m.cols()) <= a.disc_cap {
        let uniform = DistributionMatrix::uniform(m.rows(), m.cols());
        (
            to_value(&shaltiel_verify(&m)?),
            to_value(&gamma2_star_interval(&m, &uniform)?),
        )
    } else {
        warnings.push(format!("discrepancy skipped: shorter side exceeds the cap {}", a.disc_cap));
        (Value::Null, Value::Null)
    };
    Ok(Outcome {
        result: json!({
            "rows": m.rows(),
            "cols": m.cols(),
            "balanced": balance.balanced,
            "strongly_balanced": balance.strongly_balanced,
            "row_sums": balance.row_sums,
            "col_sums": balance.col_sums,
            "exact_rank": exact_rank(&m),
            "spectrum": to_value(&spectrum),
            "s4_free": s4_free,
            "s4_free_ordered": s4_free_ordered,
            "discrepancy": shaltiel,
            "gamma2_star_uniform": gamma2,
            "warnings": warnings,
        }),
        ok: true,
    })
}

fn approx(a: &ApproxArgs) -> Result<Outcome> {
    let f = load_function(&a.function)?;
    let res = approx_degree(&f, a.epsilon)?;
    let mut out = json!({
        "arity": f.arity(),
        "truth_table": f.to_string().trim_end(),
        "approx": to_value(&res),
    });
    let mut ok = true;
    if a.dual {
        let w = dual_polynomial(&f, a.epsilon)?;
        let v = verify_dual(&w, &f)?;
        ok = v.passed;
        out["dual"] = to_value(&w);
        out["dual_verification"] = to_value(&v);
    }
    Ok(Outcome { result: out, ok })
}

fn compose(a: &ComposeArgs) -> Result<Outcome> {
    let f = load_function(&a.function)?;
    let g = load_matrix(&a.inner)?;
    let n = a.blocks.unwrap_or(f.arity());
    let comp = compose_block(&f, &g, n)?;
    let mut out = json!({
        "n": n,
        "rows": comp.matrix.rows(),
        "cols": comp.matrix.cols(),
        "fourier_checked": comp.fourier_checked,
        "spectral_norm": comp.matrix.spectral_norm()?,
        "character_orthogonality": to_value(&verify_orthogonality(&g, n)?),
    });
    if a.print_matrix {
        out["matrix"] = json!(matrix_rows(&comp.matrix));
    }
    let mut ok = true;
    if a.verify_rank {
        let rep = verify_rank_theorem(&f, &g)?;
        ok &= rep.equal;
        out["rank_theorem"] = to_value(&rep);
    } else {
        out["exact_rank"] = json!(exact_rank(&comp.matrix));
    }
    if a.witness {
        let w = dual_polynomial(&f, a.epsilon)?;
        let mu = match &a.mu {
            Some(p) => Some(DistributionMatrix::parse(&read(p)?)?),
            None => None,
        };
        let b = build_witness(&f, &w, &g, mu.as_ref())?;
        ok &= b.l1_ok && b.correlation_ok && b.bound_ok.unwrap_or(true);
        let mut wv = to_value(&b);
        if !a.print_matrix {
            wv.as_object_mut().expect("struct").remove("b");
        }
        out["witness"] = wv;
    }
    Ok(Outcome { result: out, ok })
}

fn bound_outcome(rep: &BoundReport) -> Outcome {
    Outcome {
        result: to_value(rep),
        ok: rep.is_informative(),
    }
}

fn lower_bound(a: &LowerBoundArgs) -> Result<Outcome> {
    let f = load_function(&a.function)?;
    let g = load_matrix(&a.inner)?;
    let rep = match a.theorem {
        Theorem::Sherstov => sherstov_bound(&f, &g, a.epsilon0)?,
        Theorem::Disc => disc_bound(&f, &g)?,
        Theorem::Shizhu => {
            let mu = match &a.mu {
                Some(p) => DistributionMatrix::parse(&read(p)?)?,
                None => DistributionMatrix::uniform(g.rows(), g.cols()),
            };
            shizhu_bound(&f, &g, &mu, a.epsilon0)?
        }
    };
    Ok(bound_outcome(&rep))
}

fn parse_values(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Argument(format!("bad function value `{}`", t.trim())))
        })
        .collect()
}

fn table_for(gmap: &GroupMapMatrix, table: Option<&Path>) -> Result<CharacterTable> {
    let t = match table {
        Some(p) => CharacterTable::from_json(&read(p)?)?,
        None => characters_abelian(
            gmap.group()
                .abelian()
                .ok_or_else(|| Error::Argument("a character table is required".into()))?,
        ),
    };
    if t.order() != gmap.group().order() {
        return Err(Error::Argument(format!(
            "table order {} does not match the group order {}",
            t.order(),
            gmap.group().order()
        )));
    }
    Ok(t)
}

fn group(a: &GroupArgs) -> Result<Outcome> {
    if !a.degeneration.is_empty() {
        let blocks = a.degeneration.iter().map(load_matrix).collect::<Result<Vec<_>>>()?;
        let rep = degeneration_check(&blocks)?;
        return Ok(Outcome {
            ok: rep.equivalent,
            result: json!({ "mode": "degeneration", "report": to_value(&rep) }),
        });
    }
    if let Some(moduli) = &a.line_regular_search {
        let rep = line_regular_search(moduli, (a.block_rows, a.block_cols), a.trials, a.seed)?;
        return Ok(Outcome {
            ok: true,
            result: json!({ "mode": "line_regular_search", "report": to_value(&rep) }),
        });
    }
    match a.gmap.len() {
        0 => Err(Error::Argument(
            "group-check needs --gmap, --degeneration or --line-regular-search".into(),
        )),
        1 => single_group(a, &a.gmap[0]),
        _ => block_groups(a),
    }
}

fn single_group(a: &GroupArgs, path: &Path) -> Result<Outcome> {
    let gmap = GroupMapMatrix::parse(&read(path)?)?;
    let table = table_for(&gmap, a.table.as_deref())?;
    let id = table.identity_index()?;
    let easy = a.easy.clone().unwrap_or_else(|| vec![id]);
    let partition = HardnessPartition::from_easy(table.h(), &easy)?;
    let regularity = regularity_check(&gmap);
    let orth = orthogonality_general(&gmap, &table, &partition.hard)?;
    let sets = pair_multisets(&gmap)?;
    let mut disagreements = 0;
    let mut diagonalised = 0;
    for t in sets.rows.iter().chain(&sets.cols) {
        let rep = tprime_check(t, &table)?;
        disagreements += usize::from(!rep.agree);
        diagonalised += usize::from(rep.direct_holds);
    }
    let mut out = json!({
        "mode": "single",
        "rows": gmap.rows(),
        "cols": gmap.cols(),
        "group_order": gmap.group().order(),
        "characters": table.h(),
        "easy": partition.easy,
        "hard": partition.hard,
        "regularity": to_value(&regularity),
        "orthogonality": to_value(&orth),
        "pair_multisets": {
            "count": sets.rows.len() + sets.cols.len(),
            "diagonalised": diagonalised,
            "tprime_disagreements": disagreements,
        },
    });
    let mut ok = regularity.regular && orth.passed && disagreements == 0;
    if let Some(text) = &a.function {
        let f = parse_values(text)?;
        let dist = distance_to_easy(&f, &table, &partition.easy)?;
        let h = dual_h(&f, &table, &partition.easy)?;
        let mut part = partition.clone();
        part.delta = Some(dist.delta);
        let rep = general_bound(&gmap, &f, &table, &part, a.epsilon)?;
        ok = rep.is_informative();
        out["distance"] = to_value(&dist);
        out["dual_h"] = to_value(&h);
        out["bound"] = to_value(&rep);
    }
    Ok(Outcome { result: out, ok })
}

fn block_groups(a: &GroupArgs) -> Result<Outcome> {
    if a.table.is_some() {
        return Err(Error::Argument("block products use generated Abelian tables".into()));
    }
    let gmaps = a
        .gmap
        .iter()
        .map(|p| GroupMapMatrix::parse(&read(p)?))
        .collect::<Result<Vec<_>>>()?;
    let tables = gmaps
        .iter()
        .map(|g| table_for(g, None))
        .collect::<Result<Vec<_>>>()?;
    let text = a
        .function
        .as_ref()
        .ok_or_else(|| Error::Argument("block mode needs --function on the product group".into()))?;
    let f = parse_values(text)?;
    let (product, counts) = product_table(&tables)?;
    if f.len() != product.order() {
        return Err(Error::Argument(format!(
            "expected {} function values, found {}",
            product.order(),
            f.len()
        )));
    }
    let rep = block_group_bound(&gmaps, &f, &tables)?;
    Ok(Outcome {
        ok: rep.is_informative(),
        result: json!({
            "mode": "block",
            "blocks": gmaps.len(),
            "product_order": product.order(),
            "nonidentity_components": counts,
            "bound": to_value(&rep),
        }),
    })
}

fn search(a: &SearchArgs) -> Result<Outcome> {
    let found = if a.exhaustive {
        let mut all = enumerate_strongly_balanced(a.rows, a.cols, a.max_nodes)?;
        all.truncate(a.max);
        all
    } else {
        let forbidden = a.forbid.as_ref().map(load_matrix).transpose()?;
        search_strongly_balanced(
            a.rows,
            a.cols,
            &SearchConstraints {
                min_rank: a.min_rank,
                forbidden,
                max_emitted: a.max,
                max_nodes: a.max_nodes,
            },
        )?
    };
    let matrices: Vec<Value> = found
        .iter()
        .map(|m| json!({ "rows": matrix_rows(m), "rank": exact_rank(m) }))
        .collect();
    Ok(Outcome {
        ok: !found.is_empty(),
        result: json!({ "count": found.len(), "matrices": matrices }),
    })
}

fn suite(a: &SuiteArgs) -> Result<Outcome> {
    let rep = run_all(a.seed, &a.only)?;
    Ok(Outcome {
        ok: rep.passed,
        result: to_value(&rep),
    })
}
