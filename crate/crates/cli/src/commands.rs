use std::fmt;
use std::fs;
use std::path::Path;

use meetimp::algebra::{
    closure_search, count_upsets, dual_poset_of_lattice, eta_check, formula_for_element, free_meet_impl_algebra,
    s_translate, FiniteLattice, SearchBudget,
};
use meetimp::definability::{
    definable_closure, definable_family, is_meet_impl_definable, rieger_nishimura_report, witness_formula,
    DefinabilityError, DefinabilityVerdict, Violation,
};
use meetimp::dejongh::DeJonghBuilder;
use meetimp::kripke::{load_frame, load_model, to_dot, LoadedModel, ModelFile};
use meetimp::selftest::{run_selftest, SelfTestConfig};
use meetimp::subframe::{subframe_formula, subframe_refutation_check, subframe_report, ColouringVariant};
use meetimp::universal::{
    build_meet_impl_universal, build_truncated_universal, PointId, TruncatedUniversalModel, UniverseStore,
};
use meetimp::{classify_fragment, parse, Formula, UpSet};

use crate::{Cli, Command, Export, GlobalOpts};

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or unreadable input; exit status 2.
    Usage(String),
    /// A check or computation did not succeed; exit status 1.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) | CliError::Failed(msg) => f.write_str(msg),
        }
    }
}

type CliResult = Result<(), CliError>;

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(msg.to_string())
}

fn failed(msg: impl fmt::Display) -> CliError {
    CliError::Failed(msg.to_string())
}

struct Out {
    quiet: bool,
}

impl Out {
    fn info(&self, line: impl fmt::Display) {
        if !self.quiet {
            println!("{line}");
        }
    }

    fn data(&self, line: impl fmt::Display) {
        println!("{line}");
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_model(path: &Path) -> Result<LoadedModel, CliError> {
    load_model(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn read_formula(text: &str) -> Result<Formula, CliError> {
    parse(text).map_err(|e| usage(format!("formula {text:?}: {e}")))
}

fn parse_upset(loaded: &LoadedModel, text: &str) -> Result<UpSet, CliError> {
    let mut points = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let id: i64 = part.parse().map_err(|_| usage(format!("bad point id {part:?}")))?;
        points.push(loaded.index_of(id).ok_or_else(|| usage(format!("no point with id {id}")))?);
    }
    loaded.model.poset().upset_from_points(points).map_err(|e| usage(format!("{text:?}: {e}")))
}

fn format_set(ids: &[i64], u: &UpSet) -> String {
    let mut chosen: Vec<i64> = u.points().map(|x| ids[x]).collect();
    chosen.sort_unstable();
    let parts: Vec<String> = chosen.iter().map(|id| id.to_string()).collect();
    format!("{{{}}}", parts.join(", "))
}

fn budget(global: &GlobalOpts) -> SearchBudget {
    SearchBudget { max_formula_size: global.max_formula_size, ..SearchBudget::default() }
}

pub fn run(cli: &Cli) -> CliResult {
    let out = Out { quiet: cli.global.quiet };
    let g = &cli.global;
    match &cli.command {
        Command::Parse { formula } => cmd_parse(&out, formula),
        Command::Eval { model, formula } => cmd_eval(&out, model, formula),
        Command::Universal { n, d, export } => {
            let mut store = UniverseStore::new(*n).map_err(usage)?;
            let t = build_truncated_universal(&mut store, *d, g.max_points).map_err(failed)?;
            report_universal(&out, &t, export)
        }
        Command::MeetimpUniversal { n, export } => {
            let mut store = UniverseStore::new(*n).map_err(usage)?;
            let t = build_meet_impl_universal(&mut store, g.max_points).map_err(failed)?;
            report_universal(&out, &t, export)
        }
        Command::Free { n, table } => cmd_free(&out, g, *n, *table),
        Command::Dejongh { n, d, point } => cmd_dejongh(&out, g, *n, *d, *point),
        Command::STranslate { n, formula } => cmd_s_translate(&out, g, *n, formula),
        Command::Definable { model, upset } => cmd_definable(&out, model, upset),
        Command::Closure { model, upset } => {
            let loaded = read_model(model)?;
            let u = parse_upset(&loaded, upset)?;
            out.data(format_set(&loaded.ids, &definable_closure(&loaded.model, &u)));
            Ok(())
        }
        Command::Family { model } => {
            let loaded = read_model(model)?;
            let family = definable_family(&loaded.model).map_err(failed)?;
            out.info(format!("{} definable up-sets", family.len()));
            for u in &family {
                out.data(format_set(&loaded.ids, u));
            }
            Ok(())
        }
        Command::Witness { model, upset } => {
            let loaded = read_model(model)?;
            let u = parse_upset(&loaded, upset)?;
            match witness_formula(&loaded.model, &u, budget(g)) {
                Ok(f) => {
                    out.data(f);
                    Ok(())
                }
                Err(DefinabilityError::NotDefinable(v)) => Err(failed(describe_violation(&loaded.ids, v))),
                Err(e) => Err(failed(e)),
            }
        }
        Command::RnReport { d, dot } => {
            let report = rieger_nishimura_report(*d).map_err(failed)?;
            print!("{}", report.render());
            if let Some(path) = dot {
                write(path, &report.dot())?;
                out.info(format!("wrote {}", path.display()));
            }
            if report.passed() {
                Ok(())
            } else {
                Err(failed("some report checks failed"))
            }
        }
        Command::Subframe { frame, variant, emit_formula, check } => {
            cmd_subframe(&out, g, frame, variant, *emit_formula, check.as_deref())
        }
        Command::Dualize { frame, free, json } => cmd_dualize(&out, g, frame.as_deref(), *free, json.as_deref()),
        Command::CountUpsets { frame, meetimp } => {
            let count = match (frame, meetimp) {
                (Some(path), _) => {
                    let f = load_frame(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    count_upsets(&f.poset)
                }
                (None, Some(n)) => {
                    let mut store = UniverseStore::new(*n).map_err(usage)?;
                    let t = build_meet_impl_universal(&mut store, g.max_points).map_err(failed)?;
                    out.info(format!("carrier: {} points", t.model().len()));
                    count_upsets(t.model().poset())
                }
                (None, None) => return Err(usage("pass --frame or --meetimp")),
            };
            out.data(count);
            Ok(())
        }
        Command::Selftest { models, max_vars } => {
            let algebras = (1..=*max_vars)
                .map(|n| free_meet_impl_algebra(n, g.max_points))
                .collect::<Result<Vec<_>, _>>()
                .map_err(failed)?;
            let config =
                SelfTestConfig { seed: g.seed, models: *models, max_vars: *max_vars, ..SelfTestConfig::default() };
            out.info(format!("seed {}, {} models, up to {} variables", g.seed, models, max_vars));
            let report = run_selftest(&config, &algebras);
            for o in &report.outcomes {
                out.data(o);
            }
            if report.passed() {
                Ok(())
            } else {
                Err(failed("property suite reported failures"))
            }
        }
    }
}

fn cmd_parse(out: &Out, text: &str) -> CliResult {
    let f = read_formula(text)?;
    let class = classify_fragment(&f);
    out.data(format!("formula: {f}"));
    out.data(format!("meet-implication: {}", class.meet_implication()));
    out.info(format!("size: {}", f.size()));
    out.info(format!("uses or: {}", class.uses_or));
    out.info(format!("uses bottom: {}", class.uses_bot));
    Ok(())
}

fn cmd_eval(out: &Out, path: &Path, text: &str) -> CliResult {
    let loaded = read_model(path)?;
    let f = read_formula(text)?;
    let value = loaded.model.evaluate(&f).map_err(usage)?;
    out.info(format!("model: {} points, {} variables", loaded.model.len(), loaded.model.num_vars()));
    out.data(format_set(&loaded.ids, &value));
    Ok(())
}

fn report_universal(out: &Out, t: &TruncatedUniversalModel, export: &Export) -> CliResult {
    out.data(format!("points: {}", t.model().len()));
    out.info(&t.stats);
    let labels = t.submodel.labels();
    if let Some(path) = &export.dot {
        write(path, &to_dot(t.model(), &labels, None))?;
        out.info(format!("wrote {}", path.display()));
    }
    if let Some(path) = &export.json {
        write(path, &ModelFile::from_model(t.model(), &labels).to_json())?;
        out.info(format!("wrote {}", path.display()));
    }
    Ok(())
}

fn cmd_free(out: &Out, g: &GlobalOpts, n: usize, table: bool) -> CliResult {
    let alg = free_meet_impl_algebra(n, g.max_points).map_err(failed)?;
    let labels = alg.universal().submodel.labels();
    out.data(format!("carrier: {} points, elements: {}", alg.carrier().len(), alg.element_count()));
    for (i, gen) in alg.generators().iter().enumerate() {
        out.info(format!("g{} = {}", i + 1, format_set(&labels, gen)));
    }
    if table {
        let closure = closure_search(alg.carrier(), None, budget(g));
        if !closure.is_complete() {
            return Err(failed(format!(
                "extraction stopped at formula size {} with {} elements; the table needs all of them",
                closure.explored_size(),
                closure.len()
            )));
        }
        for u in closure.elements() {
            out.data(format!("{}\t{}", format_set(&labels, u), closure.get(u).expect("found")));
        }
    }
    Ok(())
}

fn cmd_dejongh(out: &Out, g: &GlobalOpts, n: usize, d: usize, point: Option<u32>) -> CliResult {
    let mut store = UniverseStore::new(n).map_err(usage)?;
    let t = build_truncated_universal(&mut store, d, g.max_points).map_err(failed)?;
    let ids: Vec<PointId> = match point {
        Some(id) if t.submodel.contains(PointId(id)) => vec![PointId(id)],
        Some(id) => return Err(usage(format!("point {id} is not in the depth-{d} truncation"))),
        None => t.ids().to_vec(),
    };
    let mut builder = DeJonghBuilder::new(&store);
    let vars = |vs: &[usize]| vs.iter().map(|v| format!("p{v}")).collect::<Vec<_>>().join(", ");
    for id in ids {
        let triple = builder.triple(id).clone();
        let succ: Vec<String> = triple.successors.iter().map(|s| s.to_string()).collect();
        out.data(format!("point {} colour {}", id, store.colour(id).to_bitstring(n)));
        out.data(format!(
            "  T: {{{}}}  B: {{{}}}  I: {{{}}}",
            vars(&triple.true_vars),
            vars(&triple.border_vars),
            succ.join(", ")
        ));
        out.data(format!("  theta: {}", triple.theta));
        out.data(format!("  phi: {}", triple.phi));
        out.data(format!("  psi: {}", triple.psi));
    }
    Ok(())
}

fn cmd_s_translate(out: &Out, g: &GlobalOpts, n: usize, text: &str) -> CliResult {
    let f = read_formula(text)?;
    let alg = free_meet_impl_algebra(n, g.max_points).map_err(failed)?;
    let value = s_translate(&f, &alg).map_err(usage)?;
    let labels = alg.universal().submodel.labels();
    out.data(format!("value: {}", format_set(&labels, &value)));
    match formula_for_element(&alg, &value, budget(g)) {
        Ok(phi) => out.data(format!("formula: {phi}")),
        Err(e) => out.info(format!("no formula found: {e}")),
    }
    Ok(())
}

fn describe_violation(ids: &[i64], v: Violation) -> String {
    match v {
        Violation::SeparatedAbove { point } => {
            format!("point {} is outside while every separated point above it is inside", ids[point])
        }
        Violation::Bisimilar { outside, inside } => format!(
            "separated points {} (outside) and {} (inside) are bisimilar in the separated submodel",
            ids[outside], ids[inside]
        ),
    }
}

fn cmd_definable(out: &Out, path: &Path, text: &str) -> CliResult {
    let loaded = read_model(path)?;
    let u = parse_upset(&loaded, text)?;
    match is_meet_impl_definable(&loaded.model, &u) {
        DefinabilityVerdict::Definable { witness } => {
            let mut store = UniverseStore::new(loaded.model.num_vars()).map_err(usage)?;
            let image = meetimp::universal::meet_impl_image(&loaded.model, &mut store).map_err(failed)?;
            out.data("definable: true");
            out.data(format!("witness: {}", format_set(&image.image.labels(), &witness)));
            out.info("witness lists universal store ids");
        }
        DefinabilityVerdict::NotDefinable(v) => {
            out.data("definable: false");
            out.data(format!("violation: {}", describe_violation(&loaded.ids, v)));
        }
    }
    Ok(())
}

fn cmd_subframe(
    out: &Out,
    g: &GlobalOpts,
    frame_path: &Path,
    variant: &str,
    emit_formula: bool,
    check: Option<&Path>,
) -> CliResult {
    let frame = load_frame(&read(frame_path)?).map_err(|e| usage(format!("{}: {e}", frame_path.display())))?;
    let variant: ColouringVariant = variant.parse().map_err(usage)?;
    let n = variant.num_vars(frame.poset.len());
    let mut store = UniverseStore::new(n).map_err(usage)?;
    let report = subframe_report(&frame.poset, variant, &mut store).map_err(usage)?;
    out.data(format!("variant: {variant}"));
    out.data(format!("variables: {n}"));
    for x in 0..report.model.len() {
        out.info(format!("  {}: {}", frame.ids[x], report.model.colour(x).to_bitstring(n)));
    }
    out.data(format!("point: {}", report.point));
    out.data(format!("all separated: {}", report.flags.all_separated));
    out.data(format!("injective: {}", report.flags.injective));
    out.data(format!("image is principal: {}", report.flags.image_is_principal));
    if (emit_formula || check.is_some()) && !report.flags.all() {
        return Err(failed(format!("verification failed for the {variant} colouring")));
    }
    if emit_formula {
        let beta = subframe_formula(&frame.poset, variant, g.max_points, budget(g)).map_err(failed)?;
        out.data(format!("beta: {beta}"));
    }
    if let Some(path) = check {
        let n_model = read_model(path)?;
        let refutes = subframe_refutation_check(&frame.poset, variant, &n_model.model, &mut store).map_err(usage)?;
        out.data(format!("refutes: {refutes}"));
    }
    Ok(())
}

fn cmd_dualize(out: &Out, g: &GlobalOpts, frame: Option<&Path>, free: Option<usize>, json: Option<&Path>) -> CliResult {
    let poset = match (frame, free) {
        (Some(path), _) => load_frame(&read(path)?).map_err(|e| usage(format!("{}: {e}", path.display())))?.poset,
        (None, Some(n)) => free_meet_impl_algebra(n, g.max_points).map_err(failed)?.carrier().poset().clone(),
        (None, None) => return Err(usage("pass --frame or --free")),
    };
    if count_upsets(&poset) > 4096u32.into() {
        return Err(failed("the up-set lattice is too large to tabulate"));
    }
    let (lattice, _) = FiniteLattice::of_upsets(&poset);
    let dual = dual_poset_of_lattice(&lattice).map_err(failed)?;
    let eta = eta_check(&lattice).map_err(failed)?;
    out.data(format!("lattice: {} elements", lattice.len()));
    out.data(format!("dual: {} points", dual.poset.len()));
    out.data(format!("isomorphic to the input: {}", dual.poset.is_isomorphic(&poset)));
    out.data(format!("eta is an isomorphism: {eta}"));
    if let Some(path) = json {
        let ids: Vec<i64> = (0..dual.poset.len() as i64).collect();
        write(path, &ModelFile::from_frame(&dual.poset, &ids).to_json())?;
        out.info(format!("wrote {}", path.display()));
    }
    if eta {
        Ok(())
    } else {
        Err(failed("eta is not an isomorphism"))
    }
}
