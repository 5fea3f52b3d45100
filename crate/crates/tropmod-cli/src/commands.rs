use std::fmt::{self, Write as _};
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::json;
use tropmod_core::curves::TropicalCurve;
use tropmod_core::degeneration::{self, NodalDegeneration};
use tropmod_core::graphs::{automorphisms, enumerate_maximal, enumerate_stable};
use tropmod_core::io::{self, CurveJson, GraphJson, StackJson};
use tropmod_core::stacks::{build_moduli_stack, groupoid_presentation, ConeStack};
use tropmod_core::universal::{self, universal_fiber_check};
use tropmod_core::{Certificate, Error};

use crate::{Format, Output};

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(PathBuf, std::io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
            CliError::Usage(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::BudgetExceeded(_)) => 3,
            _ => 2,
        }
    }
}

type Outcome = Result<bool, CliError>;

impl Output {
    /// `--out json|dot|table` names a format rather than a file.
    fn resolve(&self, default: Format, allowed: &[Format]) -> Result<(Format, Option<&Path>), CliError> {
        let (named, path) = match self.out.as_deref().and_then(|p| p.to_str()) {
            Some("json") => (Some(Format::Json), None),
            Some("dot") => (Some(Format::Dot), None),
            Some("table") => (Some(Format::Table), None),
            _ => (None, self.out.as_deref()),
        };
        let format = self.format.or(named).unwrap_or(default);
        if !allowed.contains(&format) {
            return Err(CliError::Usage(format!("format {format:?} is not available here; use one of {allowed:?}")));
        }
        Ok((format, path))
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(p.to_path_buf(), e)),
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))
}

fn read_curve(path: &Path) -> Result<TropicalCurve, CliError> {
    Ok(io::curve_from_json(&read(path)?)?)
}

fn read_degeneration(path: &Path) -> Result<NodalDegeneration, CliError> {
    Ok(degeneration::degeneration_from_json(&read(path)?)?)
}

fn report(certs: &[Certificate], output: &Output) -> Outcome {
    let (format, path) = output.resolve(Format::Table, &[Format::Table, Format::Json])?;
    let passed = certs.iter().all(Certificate::passed);
    let text = match format {
        Format::Json => io::to_json(&json!({ "passed": passed, "certificates": certs })),
        _ => {
            let mut s = String::new();
            for c in certs {
                for check in &c.checks {
                    let mark = if check.passed { "PASS" } else { "FAIL" };
                    let _ = write!(s, "{mark}  {} / {}", c.name, check.name);
                    if !check.detail.is_empty() {
                        let _ = write!(s, "  ({})", check.detail);
                    }
                    s.push('\n');
                }
            }
            let _ = writeln!(s, "{}", if passed { "all checks passed" } else { "some checks failed" });
            s
        }
    };
    emit(path, &text)?;
    Ok(passed)
}

pub fn enumerate(g: u32, n: u32, maximal_only: bool, output: &Output) -> Outcome {
    let (format, path) = output.resolve(Format::Table, &[Format::Table, Format::Json])?;
    let graphs = if maximal_only { enumerate_maximal(g, n)? } else { enumerate_stable(g, n)? };
    let mut f_vector = Vec::new();
    for gr in &graphs {
        if f_vector.len() <= gr.num_edges() {
            f_vector.resize(gr.num_edges() + 1, 0);
        }
        f_vector[gr.num_edges()] += 1;
    }
    let auts: Vec<usize> = graphs.iter().map(|gr| automorphisms(gr).len()).collect();
    let text = match format {
        Format::Json => io::to_json(&json!({
            "genus": g,
            "markings": n,
            "maximal_only": maximal_only,
            "graphs": graphs.iter().zip(&auts).map(|(gr, a)| json!({
                "graph": GraphJson::from_graph(gr),
                "edges": gr.num_edges(),
                "weights": gr.weights(),
                "automorphisms": a,
            })).collect::<Vec<_>>(),
            "f_vector": f_vector,
        })),
        _ => {
            let mut s = String::from("#\tedges\tweights\t|Aut|\tedge list\tlegs\n");
            for (i, (gr, a)) in graphs.iter().zip(&auts).enumerate() {
                let _ = writeln!(s, "{i}\t{}\t{:?}\t{a}\t{:?}\t{:?}", gr.num_edges(), gr.weights(), gr.edges(), gr.legs());
            }
            let _ = writeln!(s, "f-vector by edge count: {f_vector:?}");
            s
        }
    };
    emit(path, &text)?;
    Ok(true)
}

fn stack_table(name: &str, s: &ConeStack) -> String {
    let mut out = format!("{name}: {} objects, {} arrows, f-vector {:?}\n", s.num_objects(), s.num_arrows(), s.f_vector());
    for (i, o) in s.objects().iter().enumerate() {
        let _ = writeln!(out, "  {i}\t{}\tdim {}\t|Aut| {}", o.label, o.cone.rank(), s.automorphisms(i).len());
    }
    out
}

pub fn stack(g: u32, n: u32, presentation: bool, output: &Output) -> Outcome {
    let (format, path) = output.resolve(Format::Json, &[Format::Json, Format::Dot, Format::Table])?;
    let text = if presentation {
        let p = groupoid_presentation(g, n)?;
        let pr = &p.presentation;
        match format {
            Format::Json => io::to_json(&json!({
                "atlas": StackJson::from_stack(&pr.atlas),
                "relations": StackJson::from_stack(&pr.relations),
                "source": pr.source.iter().map(|m| json!({ "object": m.object, "matrix": m.matrix })).collect::<Vec<_>>(),
                "target": pr.target.iter().map(|m| json!({ "object": m.object, "matrix": m.matrix })).collect::<Vec<_>>(),
                "unit": pr.unit,
                "inverse": pr.inverse,
                "blocks": pr.blocks,
                "maximal": p.maximal.iter().map(GraphJson::from_graph).collect::<Vec<_>>(),
            })),
            Format::Dot => pr.atlas.to_dot("U") + &pr.relations.to_dot("R"),
            Format::Table => {
                let max = |s: &ConeStack| (0..s.num_objects()).filter(|&x| s.arrows().iter().all(|a| a.src != x || a.dst == x)).count();
                let mut s = stack_table("U", &pr.atlas) + &stack_table("R", &pr.relations);
                let _ = writeln!(s, "maximal cells: U {}, R {}", max(&pr.atlas), max(&pr.relations));
                s
            }
        }
    } else {
        let m = build_moduli_stack(g, n)?;
        match format {
            Format::Json => io::stack_to_json(&m.stack),
            Format::Dot => m.stack.to_dot(&format!("M_{g},{n}")),
            Format::Table => stack_table(&format!("M_{g},{n}"), &m.stack),
        }
    };
    emit(path, &text)?;
    Ok(true)
}

pub fn cone_over(curve: &Path, output: &Output) -> Outcome {
    let (format, path) = output.resolve(Format::Json, &[Format::Json, Format::Dot, Format::Table])?;
    let c = read_curve(curve)?;
    let u = universal::cone_over(&c)?;
    let p = &u.presentation;
    let text = match format {
        Format::Dot => u.to_dot("Cone"),
        Format::Json => io::to_json(&json!({
            "curve": CurveJson::from_curve(&c),
            "presentation": StackJson::from_stack(p),
            "h": u.h,
            "structure_map": u.structure_map.iter().map(|m| &m.matrix).collect::<Vec<_>>(),
            "sections": u.sections.iter().map(|(l, x)| json!({ "label": l, "object": x })).collect::<Vec<_>>(),
        })),
        Format::Table => {
            let mut s = stack_table("Cone", p);
            for (x, h) in u.h.iter().enumerate() {
                let _ = writeln!(s, "  H({}) = {h}", p.objects()[x].label);
            }
            s
        }
    };
    emit(path, &text)?;
    Ok(p.is_cone_space()?)
}

pub fn forget(curve: &Path, leg: Option<u32>, output: &Output) -> Outcome {
    let (format, path) = output.resolve(Format::Json, &[Format::Json, Format::Dot])?;
    let c = read_curve(curve)?;
    let f = match leg {
        Some(l) => universal::forget_leg(&c, l)?,
        None => universal::forget(&c)?,
    };
    let text = match format {
        Format::Dot => io::curve_to_dot(&f.curve, "forgotten"),
        _ => io::to_json(&json!({ "curve": CurveJson::from_curve(&f.curve), "datum": f.datum, "case": f.case })),
    };
    emit(path, &text)?;
    Ok(true)
}

pub fn clutch(left: &Path, right: Option<&Path>, length: &str, star: Option<u32>, bullet: Option<u32>, output: &Output) -> Outcome {
    let (format, path) = output.resolve(Format::Json, &[Format::Json, Format::Dot])?;
    let d: Vec<i64> = serde_json::from_str(length).map_err(|e| CliError::Usage(format!("--length must be an integer array: {e}")))?;
    let d = d.into();
    let l = read_curve(left)?;
    let labels = l.graph.labels();
    let star = star.or(labels.last().copied()).ok_or_else(|| CliError::Usage("left curve has no legs".into()))?;
    let out = match right {
        Some(r) => {
            let r = read_curve(r)?;
            let bullet = bullet.or(r.graph.labels().first().copied()).ok_or_else(|| CliError::Usage("right curve has no legs".into()))?;
            universal::clutch(&l, star, &r, bullet, &d)?
        }
        None => {
            let bullet = bullet.ok_or_else(|| CliError::Usage("self-clutching needs --bullet".into()))?;
            universal::self_clutch(&l, star, bullet, &d)?
        }
    };
    let text = match format {
        Format::Dot => io::curve_to_dot(&out, "clutched"),
        _ => io::curve_to_json(&out),
    };
    emit(path, &text)?;
    Ok(true)
}

pub fn tropicalize(path_in: &Path, output: &Output) -> Outcome {
    let (format, path) = output.resolve(Format::Json, &[Format::Json, Format::Dot])?;
    let c = degeneration::tropicalize(&read_degeneration(path_in)?)?;
    let text = match format {
        Format::Dot => io::curve_to_dot(&c, "dual"),
        _ => io::curve_to_json(&c),
    };
    emit(path, &text)?;
    Ok(true)
}

pub fn verify_universal(curve: &Path, leg_bound: i64, budget: u64, output: &Output) -> Outcome {
    let c = read_curve(curve)?;
    let cert = universal_fiber_check(&c, leg_bound, budget)?;
    report(&[cert], output)
}

fn squares_for(x: &NodalDegeneration) -> Result<Vec<Certificate>, CliError> {
    let mut certs = vec![degeneration::check_all_faces(x)?];
    match degeneration::check_forget_square(x) {
        Ok(c) => certs.push(c),
        Err(Error::UnstablePair { .. } | Error::InvalidDegeneration(_)) => {}
        Err(e) => return Err(e.into()),
    }
    Ok(certs)
}

pub fn verify_squares(path: Option<&Path>, seed: Option<u64>, count: usize, output: &Output) -> Outcome {
    if path.is_none() && seed.is_none() {
        return Err(CliError::Usage("give --degeneration, --seed, or both".into()));
    }
    let mut certs = Vec::new();
    if let Some(p) = path {
        certs.extend(squares_for(&read_degeneration(p)?)?);
    }
    if let Some(seed) = seed {
        let corpus = degeneration::random_corpus(seed, count);
        let mut summary = Certificate::new(format!("random corpus (seed {seed}, {count} cases)"));
        for (i, x) in corpus.iter().enumerate() {
            for c in squares_for(x)? {
                summary.check(
                    format!("case {i}: {}", c.name),
                    c.passed(),
                    c.failures().iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("; "),
                );
            }
            if let Some(y) = corpus.get(i + 1).filter(|y| y.cone == x.cone) {
                let star = *x.markings.keys().next_back().expect("corpus curves carry markings");
                let shifted = NodalDegeneration { markings: y.markings.iter().map(|(&l, c)| (l + star, c.clone())).collect(), ..y.clone() };
                let bullet = *shifted.markings.keys().next().expect("corpus curves carry markings");
                let d = vec![1; x.cone.rank()].into();
                let c = degeneration::check_clutch_square(x, star, &shifted, bullet, &d)?;
                summary.check(format!("case {i}: {}", c.name), c.passed(), "");
            }
        }
        certs.push(summary);
    }
    report(&certs, output)
}

pub fn verify_axioms(path: &Path, require_space: bool, require_complex: bool, output: &Output) -> Outcome {
    let s = io::stack_from_json(&read(path)?)?;
    let mut cert = Certificate::new("axioms");
    cert.absorb(s.verify());
    let space = s.is_cone_space()?;
    let complex = s.verify_cone_complex();
    let mut kind = Certificate::new("classification");
    kind.check("cone space", space, "");
    kind.check("cone complex", complex.passed(), complex.failures().iter().map(|f| f.name.as_str()).collect::<Vec<_>>().join("; "));
    let (format, out) = output.resolve(Format::Table, &[Format::Table, Format::Json])?;
    let passed = cert.passed() && (!require_space || space) && (!require_complex || complex.passed());
    let text = match format {
        Format::Json => io::to_json(&json!({ "passed": passed, "certificates": [cert, kind] })),
        _ => {
            let mut t = String::new();
            for c in &cert.checks {
                let _ = writeln!(t, "{}  {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
            }
            let _ = writeln!(t, "cone-space: {}", if space { "pass" } else { "fail" });
            let _ = writeln!(t, "cone-complex: {}", if complex.passed() { "pass" } else { "fail" });
            t
        }
    };
    emit(out, &text)?;
    Ok(passed)
}
