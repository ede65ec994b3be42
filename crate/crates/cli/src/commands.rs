use std::fmt::Write as _;
use std::path::Path;

use automeasure::conditionals::{self, ConditionalReport};
use automeasure::groups::{FiniteGroup, GroupSpec, Subgroup};
use automeasure::lifted;
use automeasure::measures::{Measure, MeasureSpec};
use automeasure::rational::{self, Q};
use automeasure::rlp::{self, PQSystem, RationalPoint};
use automeasure::rules::RuleSpec;
use automeasure::synthesis::{self, RoundTrip, SetMeasureSpec};
use automeasure::{Alphabet, LocalRule, Symbol};
use serde::Serialize;
use serde_json::json;

use crate::report::{to_value, CliResult, InputError, Inputs, Outcome, Verdict};
use crate::{Command, ConditionalCmd, GroupCmd, LiftCmd, MeasureCmd, RlpCmd, RuleCmd, Settings, SynthCmd};

pub fn run(cmd: &Command, settings: &Settings, inputs: &mut Inputs) -> CliResult<Outcome> {
    let mut ctx = Ctx { settings, inputs };
    match cmd {
        Command::Rule(RuleCmd::Check { rule }) => rule_check(&mut ctx, rule),
        Command::Group(GroupCmd::Info { group, subgroup }) => group_info(&mut ctx, group, subgroup.as_deref()),
        Command::Measure(c) => match c {
            MeasureCmd::Check { spec, rule, n } => measure_check(&mut ctx, spec, rule.as_deref(), *n),
            MeasureCmd::Entropy { spec, n } => measure_entropy(&mut ctx, spec, *n),
            MeasureCmd::Eval { spec, word } => measure_eval(&mut ctx, spec, word),
        },
        Command::Conditional(c) => match c {
            ConditionalCmd::Census { spec, rule, n } => census(&mut ctx, spec, rule.as_deref(), *n),
            ConditionalCmd::Coset { spec, group, n } => coset(&mut ctx, spec, group, *n),
            ConditionalCmd::TailProbe { spec, k, n } => tail_probe(&mut ctx, spec, *k, *n),
            ConditionalCmd::At { spec, word, group, rule } => {
                conditional_at(&mut ctx, spec, word, group.as_deref(), rule.as_deref())
            }
            ConditionalCmd::UPartition {
                spec,
                word,
                group,
                subgroup,
            } => u_partition(&mut ctx, spec, word, group, subgroup),
        },
        Command::Lift(c) => match c {
            LiftCmd::ZWords {
                rule,
                k,
                len,
                steps,
                group,
            } => z_words(&mut ctx, rule, *k, *len, *steps, group.as_deref()),
            LiftCmd::Pi { spec, rule, n, margin } => pi(&mut ctx, spec, rule, *n, *margin),
            LiftCmd::Intertwine { spec, rule, n, margin } => intertwine(&mut ctx, spec, rule, *n, *margin),
        },
        Command::Synth(c) => match c {
            SynthCmd::Run {
                nu,
                rule,
                n,
                verify,
                round_trip,
                margin,
                out,
            } => synth_run(&mut ctx, nu, rule, *n, *verify, *round_trip, *margin, out.as_deref()),
            SynthCmd::Dihedral { m, nu2, n, out } => synth_dihedral(&mut ctx, *m, nu2, *n, out.as_deref()),
        },
        Command::Rlp(c) => match c {
            RlpCmd::Counts { pq, l_max } => rlp_counts(pq.p, pq.q, *l_max),
            RlpCmd::Diagram { pq, x, w, h } => rlp_diagram(pq.p, pq.q, x, *w, *h),
        },
    }
}

struct Ctx<'a> {
    settings: &'a Settings,
    inputs: &'a mut Inputs,
}

impl Ctx<'_> {
    fn rule(&mut self, path: &Path) -> CliResult<LocalRule> {
        Ok(self.inputs.load::<RuleSpec>(path)?.build()?)
    }

    fn group(&mut self, path: &Path) -> CliResult<FiniteGroup> {
        Ok(self.inputs.load::<GroupSpec>(path)?.build()?)
    }

    fn measure(&mut self, path: &Path) -> CliResult<Measure> {
        let spec: MeasureSpec = self.inputs.load(path)?;
        Ok(Measure::compile(&spec)?.with_depth_cap(self.settings.depth_cap))
    }

    fn compile(&self, spec: &MeasureSpec) -> CliResult<Measure> {
        Ok(Measure::compile(spec)?.with_depth_cap(self.settings.depth_cap))
    }
}

fn fmt_set(alphabet: &Alphabet, set: &[Symbol]) -> String {
    let labels: Vec<&str> = set.iter().map(|&s| alphabet.label(s)).collect();
    format!("{{{}}}", labels.join(","))
}

fn fmt_probs(alphabet: &Alphabet, probs: &[Q]) -> String {
    probs
        .iter()
        .enumerate()
        .map(|(a, p)| format!("{}:{}", alphabet.label(a as Symbol), rational::to_string(p)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn verdict_line(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "verdict: pass\n",
        Verdict::Fail => "verdict: FAIL\n",
        Verdict::Info => "",
    }
}

fn subgroup_arg(g: &FiniteGroup, text: &str) -> CliResult<Subgroup> {
    let elems = g.alphabet().parse_word(text)?;
    Ok(g.subgroup(&elems)?)
}

fn rule_check(ctx: &mut Ctx, path: &Path) -> CliResult<Outcome> {
    let rule = ctx.rule(path)?;
    let (l, r) = (rule.is_left_permutative(), rule.is_right_permutative());
    let verdict = Verdict::from_bool(l && r);
    let text = format!(
        "alphabet size: {}\nleft permutative: {l}\nright permutative: {r}\n{}",
        rule.size(),
        verdict_line(verdict)
    );
    Ok(Outcome::new(
        verdict,
        json!({ "size": rule.size(), "left_permutative": l, "right_permutative": r }),
        text,
    ))
}

#[derive(Serialize)]
struct SubgroupInfo {
    elements: Vec<Symbol>,
    normal: bool,
    normalizer: Vec<Symbol>,
    right_cosets: Vec<Vec<Symbol>>,
    zero_entropy_sufficient: bool,
}

fn group_info(ctx: &mut Ctx, path: &Path, subgroup: Option<&str>) -> CliResult<Outcome> {
    let g = ctx.group(path)?;
    let subgroups = g.subgroups();
    let normal: Vec<Vec<Symbol>> = subgroups
        .iter()
        .filter(|h| g.is_normal(h))
        .map(|h| h.elements().to_vec())
        .collect();
    let mut text = format!(
        "order: {}\nabelian: {}\nsubgroups: {}\nnormal subgroups: {}\n",
        g.order(),
        g.is_abelian(),
        subgroups.len(),
        normal.len()
    );
    for h in &normal {
        let _ = writeln!(text, "  {}", fmt_set(g.alphabet(), h));
    }
    let mut result = json!({
        "order": g.order(),
        "abelian": g.is_abelian(),
        "subgroup_count": subgroups.len(),
        "normal_subgroups": normal,
    });
    let mut verdict = Verdict::Info;
    if let Some(text_h) = subgroup {
        let h = subgroup_arg(&g, text_h)?;
        let info = SubgroupInfo {
            elements: h.elements().to_vec(),
            normal: g.is_normal(&h),
            normalizer: g.normalizer(&h).elements().to_vec(),
            right_cosets: g.right_cosets(&h),
            zero_entropy_sufficient: g.zero_ent_suff_check(&h),
        };
        verdict = Verdict::from_bool(info.zero_entropy_sufficient);
        let _ = write!(
            text,
            "subgroup {}: normal {}, {} right cosets, zero-entropy condition {}\n{}",
            fmt_set(g.alphabet(), &info.elements),
            info.normal,
            info.right_cosets.len(),
            info.zero_entropy_sufficient,
            verdict_line(verdict)
        );
        result["subgroup"] = to_value(info);
    }
    Ok(Outcome::new(verdict, result, text))
}

fn measure_check(ctx: &mut Ctx, spec: &Path, rule: Option<&Path>, n: usize) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let rule = rule.map(|r| ctx.rule(r)).transpose()?;
    let consistent = mu.check_consistency(n)?;
    let sigma = mu.check_shift_invariance(n)?;
    let tau = rule.as_ref().map(|r| mu.check_rule_invariance(r, n)).transpose()?;
    let verdict = Verdict::from_bool(consistent && sigma && tau.unwrap_or(true));
    let mut text = format!("n: {n}\nconsistent: {consistent}\nshift invariant: {sigma}\n");
    if let Some(t) = tau {
        let _ = writeln!(text, "rule invariant: {t}");
    }
    text.push_str(verdict_line(verdict));
    Ok(Outcome::new(
        verdict,
        json!({ "n": n, "consistent": consistent, "shift_invariant": sigma, "rule_invariant": tau }),
        text,
    ))
}

fn measure_entropy(ctx: &mut Ctx, spec: &Path, n: usize) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let table = mu.entropy_table(n)?;
    let rate = if n == 0 { 0.0 } else { table[n] - table[n - 1] };
    let mut text = String::from(" n  H_n          H_n - H_{n-1}\n");
    for (i, h) in table.iter().enumerate() {
        let d = if i == 0 { 0.0 } else { h - table[i - 1] };
        let _ = writeln!(text, "{i:>2}  {h:<11.6}  {d:.6}");
    }
    let _ = writeln!(text, "rate estimate: {rate:.6}");
    Ok(Outcome::new(
        Verdict::Info,
        json!({ "n": n, "block_entropies": table, "rate_estimate": rate }),
        text,
    ))
}

fn measure_eval(ctx: &mut Ctx, spec: &Path, word: &str) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let w = mu.alphabet().parse_word(word)?;
    let mass = mu.evaluate(&w)?;
    let text = format!("mu([{}]) = {}\n", mu.alphabet().format_word(&w), mass);
    Ok(Outcome::new(
        Verdict::Info,
        json!({ "word": w, "mass": rational::to_string(&mass) }),
        text,
    ))
}

fn census(ctx: &mut Ctx, spec: &Path, rule: Option<&Path>, n: usize) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let rule = rule.map(|r| ctx.rule(r)).transpose()?;
    let census = conditionals::uniformity_census(&mu, n)?;
    let support_size = match &rule {
        Some(r) if n >= 1 => Some(conditionals::support_size_tau_invariance(&mu, r, n - 1)?),
        _ => None,
    };
    // stabilized words must be uniform; unstabilized failures are expected
    let stabilized_ok = match (&census.stabilized_mass, &census.stabilized_uniform_mass) {
        (Some(s), Some(u)) => s == u,
        _ => census.failures.is_empty(),
    };
    let ok = stabilized_ok && support_size.as_ref().is_none_or(|r| r.holds);
    let verdict = Verdict::from_bool(ok);
    let a = mu.alphabet();
    let mut text = format!(
        "n: {n}\nconditioning words: {}\nuniform mass: {}\n",
        census.words, census.uniform_mass
    );
    if let (Some(s), Some(u)) = (&census.stabilized_mass, &census.stabilized_uniform_mass) {
        let _ = writeln!(text, "stabilized mass: {s}\nstabilized uniform mass: {u}");
        for sm in &census.stabilized_supports {
            let _ = writeln!(text, "  support {}: {}", fmt_set(a, &sm.support), sm.mass);
        }
    }
    let _ = writeln!(text, "non-uniform words: {}", census.failures.len());
    for f in census.failures.iter().take(8) {
        let _ = writeln!(text, "  [{}] {}", a.format_word(&f.word), fmt_probs(a, &f.probs));
    }
    if let Some(r) = &support_size {
        let _ = writeln!(
            text,
            "support size preserved by rule: {} ({} checked, {} skipped, violation mass {})",
            r.holds, r.checked, r.skipped, r.violation_mass
        );
    }
    text.push_str(verdict_line(verdict));
    let mut result = to_value(&census);
    if let Some(r) = support_size {
        result["support_size"] = to_value(r);
    }
    Ok(Outcome::new(verdict, result, text))
}

fn coset(ctx: &mut Ctx, spec: &Path, group: &Path, n: usize) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let g = ctx.group(group)?;
    let c = conditionals::coset_census(&mu, &g, n)?;
    let verdict = Verdict::from_bool(c.violations.is_empty());
    let mut text = format!("n: {n}\nconditioning words: {}\n", c.words);
    for s in &c.subgroups {
        let _ = writeln!(text, "  cosets of {}: mass {}", fmt_set(g.alphabet(), &s.support), s.mass);
    }
    let _ = writeln!(text, "violations: {}", c.violations.len());
    text.push_str(verdict_line(verdict));
    Ok(Outcome::new(verdict, &c, text))
}

fn tail_probe(ctx: &mut Ctx, spec: &Path, k: usize, n: usize) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let t = conditionals::tail_measurability_probe(&mu, k, n)?;
    let text = format!(
        "k: {k}\nn: {n}\nconditioning words: {}\ndetermined mass: {}\n",
        t.words, t.determined_mass
    );
    Ok(Outcome::new(Verdict::Info, &t, text))
}

fn report_text(a: &Alphabet, r: &ConditionalReport) -> String {
    let mut text = format!(
        "word: [{}]\nmass: {}\nsupport: {}\nprobabilities: {}\nuniform: {}\n",
        a.format_word(&r.word),
        r.mass,
        fmt_set(a, &r.support),
        fmt_probs(a, &r.probs),
        r.uniform
    );
    if let Some(h) = &r.coset_of {
        let _ = writeln!(text, "coset of: {}", fmt_set(a, h));
    }
    text
}

fn conditional_at(
    ctx: &mut Ctx,
    spec: &Path,
    word: &str,
    group: Option<&Path>,
    rule: Option<&Path>,
) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let w = mu.alphabet().parse_word(word)?;
    let (report, verdict) = if let Some(g) = group {
        let g = ctx.group(g)?;
        let r = conditionals::coset_report(&mu, &g, &w)?;
        let v = Verdict::from_bool(!r.violation);
        (r, v)
    } else if let Some(rule) = rule {
        let rule = ctx.rule(rule)?;
        (conditionals::conditional_given_tau(&mu, &rule, &w)?, Verdict::Info)
    } else {
        (conditionals::conditional_at_zero(&mu, &w)?, Verdict::Info)
    };
    let mut text = report_text(mu.alphabet(), &report);
    text.push_str(verdict_line(verdict));
    Ok(Outcome::new(verdict, &report, text))
}

fn u_partition(ctx: &mut Ctx, spec: &Path, word: &str, group: &Path, subgroup: &str) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let g = ctx.group(group)?;
    let h = subgroup_arg(&g, subgroup)?;
    let w = mu.alphabet().parse_word(word)?;
    let p = conditionals::u_subgroup_partition(&mu, &g, &h, &w)?;
    let verdict = Verdict::from_bool(p.u.is_some());
    let a = g.alphabet();
    let mut text = format!("coset: {}\n", fmt_set(a, &p.coset));
    for (block, forced) in p.blocks.iter().zip(&p.forced) {
        let _ = writeln!(text, "  {} forces {}", fmt_set(a, block), fmt_set(a, forced));
    }
    match (&p.u, &p.diagnostic) {
        (Some(u), _) => {
            let _ = writeln!(text, "U: {}", fmt_set(a, u));
        }
        (None, Some(d)) => {
            let _ = writeln!(text, "no U: {d}");
        }
        (None, None) => {}
    }
    text.push_str(verdict_line(verdict));
    Ok(Outcome::new(verdict, &p, text))
}

fn z_words(
    ctx: &mut Ctx,
    rule: &Path,
    k: usize,
    len: usize,
    steps: usize,
    group: Option<&Path>,
) -> CliResult<Outcome> {
    let (words, alphabet, verdict, result) = match group {
        Some(gp) => {
            let rule = ctx.rule(rule)?;
            let g = ctx.group(gp)?;
            if rule.rows() != g.group_rule().rows() {
                return Err(InputError("the rule is not the multiplication rule of --group".into()));
            }
            let report = lifted::z_words_group(&g, k, len, steps)?;
            let verdict = Verdict::from_bool(report.verdict);
            (report.words.clone(), g.alphabet().clone(), verdict, to_value(&report))
        }
        None => {
            let rule = ctx.rule(rule)?;
            let words: Vec<Vec<Vec<Symbol>>> = lifted::z_words(&rule, k, len, steps)?
                .iter()
                .map(|w| lifted::expand(w))
                .collect();
            let result = json!({ "words": words });
            (words, rule.alphabet().clone(), Verdict::Info, result)
        }
    };
    let mut text = format!("k: {k}, L: {len}, N: {steps}\nwords: {}\n", words.len());
    for w in words.iter().take(32) {
        let sets: Vec<String> = w.iter().map(|s| fmt_set(&alphabet, s)).collect();
        let _ = writeln!(text, "  {}", sets.join(" "));
    }
    if words.len() > 32 {
        let _ = writeln!(text, "  ...");
    }
    if let Some(subs) = result.get("subgroups").and_then(|s| s.as_array()) {
        let _ = writeln!(text, "subgroups: {}", subs.len());
    }
    text.push_str(verdict_line(verdict));
    Ok(Outcome::new(verdict, result, text))
}

fn pi(ctx: &mut Ctx, spec: &Path, rule: &Path, n: usize, margin: usize) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let rule = ctx.rule(rule)?;
    let entries = lifted::pi_factor(&mu, &rule, n, margin)?;
    let a = mu.alphabet();
    let mut text = format!("n: {n}, margin: {margin}\nwords: {}\n", entries.len());
    for e in entries.iter().take(32) {
        let sets: Vec<String> = e.image.iter().map(|s| fmt_set(a, s)).collect();
        let mark = if e.stable { "" } else { "  (unstable)" };
        let _ = writeln!(text, "  [{}] -> {}{mark}", a.format_word(&e.word), sets.join(" "));
    }
    if entries.len() > 32 {
        let _ = writeln!(text, "  ...");
    }
    Ok(Outcome::new(Verdict::Info, json!({ "entries": entries }), text))
}

fn intertwine(ctx: &mut Ctx, spec: &Path, rule: &Path, n: usize, margin: usize) -> CliResult<Outcome> {
    let mu = ctx.measure(spec)?;
    let rule = ctx.rule(rule)?;
    let r = lifted::intertwining_check(&mu, &rule, n, margin)?;
    let verdict = Verdict::from_bool(r.holds);
    let text = format!(
        "checked: {}\nskipped (unstable): {}\nviolations: {}\n{}",
        r.checked,
        r.skipped,
        r.violations.len(),
        verdict_line(verdict)
    );
    Ok(Outcome::new(verdict, &r, text))
}

fn write_spec(path: &Path, spec: &MeasureSpec) -> CliResult<()> {
    let body = serde_json::to_string_pretty(spec).expect("spec serializes");
    std::fs::write(path, body + "\n").map_err(|e| InputError(format!("{}: {e}", path.display())))
}

#[allow(clippy::too_many_arguments)]
fn synth_run(
    ctx: &mut Ctx,
    nu_path: &Path,
    rule: &Path,
    n: usize,
    verify: bool,
    round_trip: bool,
    margin: usize,
    out: Option<&Path>,
) -> CliResult<Outcome> {
    let nu: SetMeasureSpec = ctx.inputs.load(nu_path)?;
    let rule = ctx.rule(rule)?;
    let spec = synthesis::synthesize(&nu, &rule)?;
    let mu = ctx.compile(&spec)?;
    if let Some(out) = out {
        write_spec(out, &spec)?;
    }
    let mut ok = true;
    let mut text = format!("synthesized measure over {} symbols\n", mu.alphabet().size());
    let mut result = json!({ "spec": spec });
    let cylinders: Vec<_> = mu
        .support_words(n.min(3))?
        .into_iter()
        .map(|(w, m)| json!({ "word": w, "mass": rational::to_string(&m) }))
        .collect();
    result["cylinders"] = cylinders.into();
    if verify {
        let v = synthesis::verify_synthesis_invariance(&nu, &rule, n)?;
        ok &= v.sigma && v.tau;
        let _ = writeln!(
            text,
            "shift invariant: {}\nrule invariant: {}\nsupported on size-preserving words: {}",
            v.sigma, v.tau, v.in_z
        );
        result["invariance"] = to_value(v);
    }
    if round_trip {
        let r = synthesis::round_trip_check(&nu, &rule, n, margin)?;
        ok &= r.verdict != RoundTrip::Fails;
        let _ = writeln!(text, "round trip: {}", to_value(r.verdict).as_str().unwrap_or_default());
        for note in &r.notes {
            let _ = writeln!(text, "  {note}");
        }
        result["round_trip"] = to_value(r);
    }
    let verdict = if verify || round_trip {
        Verdict::from_bool(ok)
    } else {
        Verdict::Info
    };
    text.push_str(verdict_line(verdict));
    Ok(Outcome::new(verdict, result, text))
}

fn synth_dihedral(ctx: &mut Ctx, m: usize, nu2: &Path, n: usize, out: Option<&Path>) -> CliResult<Outcome> {
    let base: MeasureSpec = ctx.inputs.load(nu2)?;
    let spec = synthesis::dihedral_lift(m, &base)?;
    if let Some(out) = out {
        write_spec(out, &spec)?;
    }
    let mu = ctx.compile(&spec)?;
    let g = FiniteGroup::dihedral(m)?;
    let rule = g.group_rule();
    let sigma = mu.check_shift_invariance(n)?;
    let tau = mu.check_rule_invariance(&rule, n)?;
    let rate = mu.entropy_rate_estimate(n)?;
    let verdict = Verdict::from_bool(sigma && tau);
    let text = format!(
        "D_{m} lift\nshift invariant: {sigma}\nrule invariant: {tau}\nentropy rate estimate (n={n}): {rate:.6}\n{}",
        verdict_line(verdict)
    );
    Ok(Outcome::new(
        verdict,
        json!({
            "m": m,
            "spec": spec,
            "shift_invariant": sigma,
            "rule_invariant": tau,
            "entropy_rate_estimate": rate,
        }),
        text,
    ))
}

fn rlp_counts(p: u64, q: u64, l_max: usize) -> CliResult<Outcome> {
    let sys = PQSystem::new(p, q)?;
    let rows = rlp::sub_exponential_report(&sys, l_max)?;
    let ok = rows
        .iter()
        .all(|r| r.max_a_over_b as u64 <= q + 1 && r.max_b_over_a <= 2);
    let verdict = Verdict::from_bool(ok);
    let mut text = format!("p={p} q={q}\n  l   m  A/B  B/A\n");
    for r in &rows {
        let _ = writeln!(text, "{:>3} {:>3} {:>4} {:>4}", r.l, r.m, r.max_a_over_b, r.max_b_over_a);
    }
    let _ = writeln!(text, "bounds: A/B <= {}, B/A <= 2", q + 1);
    text.push_str(verdict_line(verdict));
    Ok(Outcome::new(
        verdict,
        json!({ "p": p, "q": q, "bound_a_over_b": q + 1, "bound_b_over_a": 2, "rows": rows }),
        text,
    ))
}

fn rlp_diagram(p: u64, q: u64, x: &str, w: usize, h: usize) -> CliResult<Outcome> {
    let sys = PQSystem::new(p, q)?;
    let x = RationalPoint::parse(x)?;
    let grid = rlp::space_time(&sys, x, w, h);
    let digits = rlp::expansion(x, sys.base(), w.min(h));
    let diagonal = (0..w.min(h)).all(|i| grid[i][i] == digits[i]);
    let fiber = rlp::fiber_bijectivity_check(&sys, x);
    let verdict = Verdict::from_bool(diagonal && fiber);
    let mut text = format!("x = {x}, base {}\n", sys.base());
    for row in &grid {
        let cells: Vec<String> = row.iter().map(|d| format!("{d:>2}")).collect();
        let _ = writeln!(text, "{}", cells.join(" "));
    }
    let _ = write!(
        text,
        "diagonal equals base-{} expansion: {diagonal}\nfiber bijectivity at x: {fiber}\n{}",
        sys.base(),
        verdict_line(verdict)
    );
    Ok(Outcome::new(
        verdict,
        json!({
            "x": x.to_string(),
            "base": sys.base(),
            "grid": grid,
            "expansion": digits,
            "diagonal_identity": diagonal,
            "fiber_bijective": fiber,
        }),
        text,
    ))
}
