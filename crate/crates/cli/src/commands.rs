use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use lpfnt_core::io::{
    align_coefficients, is_fnt1, read_coefficients_csv, read_points_csv, read_values_csv, write_coefficients_csv,
    write_grid_csv, write_index_set, write_nodes_csv, write_tubes_csv, write_values_csv, Fnt1,
};
use lpfnt_core::mindex::cardinality_bounds;
use lpfnt_core::models::{approximation_rmse, interpolate, lookup};
use lpfnt_core::sensitivity::{analyze, mc_reference, McOptions};
use lpfnt_core::transform::{fnt_forward_counted, naive_solve};
use lpfnt_core::{
    build_index_set, fnt_inverse, Error, MultiIndexSet, NewtonInterpolant, NewtonSpace, NodeFamily, NodeSystem,
    PNorm, Result, SensitivityReport, TubeDecomposition,
};
use serde::Serialize;
use serde_json::json;

use crate::config::{EvalSource, Format, Job};
use crate::format::{join, sig6};

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = Vec::new();
    open(path)?.read_to_end(&mut bytes)?;
    Ok(bytes)
}

/// The primary output: `--out` when given, stdout otherwise.
fn sink<'a>(out: &Option<PathBuf>, stdout: &'a mut dyn Write) -> Result<Box<dyn Write + 'a>> {
    Ok(match out {
        Some(path) => Box::new(create(path)?),
        None => Box::new(stdout),
    })
}

fn write_json<W: Write, T: Serialize>(mut w: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io(e.to_string()))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn p_json(p: PNorm) -> serde_json::Value {
    if p.is_infinite() {
        json!("inf")
    } else {
        json!(p.value())
    }
}

fn opt6(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), sig6)
}

pub fn run(job: Job, out: &Option<PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match job {
        Job::Indexset {
            m,
            n,
            p,
            dump,
            tubes_out,
            format,
        } => indexset(m, n, p, dump, tubes_out, format, out, stdout),
        Job::Nodes { n, family } => write_nodes_csv(sink(out, stdout)?, &NodeSystem::new(family, n)?),
        Job::Grid { m, n, p, family } => {
            let space = NewtonSpace::lp(m, n, p, family)?;
            write_grid_csv(sink(out, stdout)?, space.set(), &space.grid())
        }
        Job::Transform {
            input,
            shape,
            family,
            naive,
            inverse,
            format,
        } => {
            if inverse {
                inverse_transform(&input, shape, family, out, stdout)
            } else {
                let (m, n, p) = shape.expect("validated");
                forward_transform(&input, m, n, p, family, naive, format, out, stdout)
            }
        }
        Job::Approximate {
            model,
            m,
            degrees,
            ps,
            family,
            test_points,
            seed,
            format,
        } => approximate(&model, m, &degrees, &ps, family, test_points, seed, format, out, stdout),
        Job::Activity {
            model,
            m,
            n,
            p,
            family,
            k,
            mc,
            seed,
            format,
        } => {
            let model = lookup(&model, m)?;
            let space = Arc::new(NewtonSpace::lp(model.dim(), n, p, family)?);
            let interp = interpolate(&model, &space)?;
            let analysis = analyze(&interp, k)?;
            let mut report = SensitivityReport::new(model.name(), &interp, n, p, &analysis);
            if let Some((samples, replications)) = mc {
                let mut options = McOptions::new(samples, replications, seed);
                options.k = k;
                report.mc = Some(mc_reference(&model, &options)?);
            }
            let mut w = sink(out, stdout)?;
            match format {
                Format::Json => write_json(w, &report),
                _ => {
                    writeln!(w, "model {}", report.model)?;
                    writeln!(w, "m {} n {} p {} cardinality {} k {}", report.m, n, p, report.cardinality, report.k)?;
                    writeln!(w, "ranking {}", join(report.ranking.iter().map(|i| format!("x{i}")), " > "))?;
                    let header = if report.mc.is_some() {
                        "input theta theta_all mc_mean mc_std"
                    } else {
                        "input theta theta_all"
                    };
                    writeln!(w, "{header}")?;
                    for i in 0..report.m {
                        let mut row = format!("x{} {} {}", i + 1, sig6(report.theta[i]), sig6(report.theta_all[i]));
                        if let Some(mc) = &report.mc {
                            row.push_str(&format!(" {} {}", sig6(mc.mean[i]), sig6(mc.std[i])));
                        }
                        writeln!(w, "{row}")?;
                    }
                    w.flush()?;
                    Ok(())
                }
            }
        }
        Job::Eval {
            source,
            m,
            family,
            points,
            reference,
        } => {
            let values = match source {
                EvalSource::Model(name) => {
                    let model = lookup(&name, m)?;
                    let x = read_points_csv(open(&points)?, model.dim())?;
                    x.chunks_exact(model.dim())
                        .map(|x| {
                            if reference {
                                model.evaluate_reference(x)
                            } else {
                                model.evaluate(x)
                            }
                        })
                        .collect::<Result<Vec<_>>>()?
                }
                EvalSource::Coefficients(path) => {
                    let interp = load_interpolant(&path, None, family)?;
                    let x = read_points_csv(open(&points)?, interp.space().dim())?;
                    interp.evaluate_many(&x)?
                }
            };
            write_values_csv(sink(out, stdout)?, "value", &values)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn indexset(
    m: usize,
    n: usize,
    p: PNorm,
    dump: bool,
    tubes_out: Option<PathBuf>,
    format: Format,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let set = build_index_set(m, n as i64, p)?;
    let bounds = cardinality_bounds(m, n as i64, p)?;
    let tubes = TubeDecomposition::new(&set)?;
    if let Some(path) = &tubes_out {
        write_tubes_csv(create(path)?, &tubes)?;
    }
    if let Some(path) = out {
        let mut w = create(path)?;
        write_index_set(&mut w, &set)?;
        w.flush()?;
    }
    match format {
        Format::Json => {
            let mut report = json!({
                "m": m,
                "n": n,
                "p": p_json(p),
                "cardinality": bounds.cardinality,
                "density": bounds.density,
                "lower_bound": bounds.lower,
                "upper_bound": bounds.upper,
                "memory_bound": bounds.memory_bound,
                "carry_count": bounds.carry_count,
                "entropy": tubes.entropy(),
            });
            if dump {
                report["indices"] = json!(set.iter().collect::<Vec<_>>());
            }
            write_json(stdout, &report)
        }
        _ => {
            writeln!(stdout, "m {m}")?;
            writeln!(stdout, "n {n}")?;
            writeln!(stdout, "p {p}")?;
            writeln!(stdout, "cardinality {}", bounds.cardinality)?;
            writeln!(stdout, "density {}", sig6(bounds.density))?;
            writeln!(stdout, "lower_bound {}", opt6(bounds.lower))?;
            writeln!(stdout, "upper_bound {}", opt6(bounds.upper))?;
            writeln!(stdout, "memory_bound {}", opt6(bounds.memory_bound))?;
            writeln!(stdout, "carry_count {}", sig6(bounds.carry_count))?;
            writeln!(stdout, "entropy {}", join(tubes.entropy(), " "))?;
            if dump {
                writeln!(stdout)?;
                write_index_set(&mut *stdout, &set)?;
            }
            Ok(())
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn forward_transform(
    input: &Path,
    m: usize,
    n: usize,
    p: PNorm,
    family: NodeFamily,
    naive: bool,
    format: Format,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let space = Arc::new(NewtonSpace::lp(m, n, p, family)?);
    let samples = read_values_csv(open(input)?)?;
    if samples.len() != space.len() {
        return Err(Error::LengthMismatch {
            expected: space.len(),
            actual: samples.len(),
        });
    }
    let (coeffs, ops) = if naive {
        (naive_solve(&samples, space.set(), space.nodes())?, None)
    } else {
        let (interp, ops) = fnt_forward_counted(&space, &samples)?;
        (interp.into_coeffs(), Some(ops))
    };
    {
        let w = sink(out, stdout)?;
        match format {
            Format::Binary => Fnt1::new(space.set(), coeffs)?.write(w)?,
            _ => write_coefficients_csv(w, space.set(), &coeffs)?,
        }
    }
    if let Some(path) = out {
        let ops = ops.map_or_else(|| "naive".to_string(), |o| o.to_string());
        writeln!(stdout, "coefficients {} ops {ops} out {}", space.len(), path.display())?;
    }
    Ok(())
}

/// Reads FNT1 or coefficient CSV. CSV files carry their own index set;
/// binary files rebuild `A_{m,n,p}` from the header.
fn load_interpolant(path: &Path, shape: Option<(usize, usize, PNorm)>, family: NodeFamily) -> Result<NewtonInterpolant> {
    let bytes = read_bytes(path)?;
    let (set, coeffs) = if is_fnt1(&bytes) {
        let file = Fnt1::read(&bytes[..])?;
        (file.index_set()?, file.coeffs)
    } else {
        let (indices, values) = read_coefficients_csv(&bytes[..])?;
        let m = indices.first().map(Vec::len).unwrap_or(0);
        let set = MultiIndexSet::from_indices(m, &indices)?;
        let coeffs = align_coefficients(&set, &indices, &values)?;
        (set, coeffs)
    };
    if let Some((m, n, p)) = shape {
        let expected = build_index_set(m, n as i64, p)?;
        if expected.as_flat() != set.as_flat() {
            return Err(Error::InvalidArgument(format!(
                "coefficients do not live on A_{{{m},{n},{p}}}"
            )));
        }
    }
    let nodes = NodeSystem::new(family, set.max_degree() as usize)?;
    let space = Arc::new(NewtonSpace::new(set, nodes)?);
    NewtonInterpolant::new(space, coeffs)
}

fn inverse_transform(
    input: &Path,
    shape: Option<(usize, usize, PNorm)>,
    family: NodeFamily,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let interp = load_interpolant(input, shape, family)?;
    write_values_csv(sink(out, stdout)?, "value", &fnt_inverse(&interp))
}

#[derive(Serialize)]
struct RmseRecord {
    model: String,
    m: usize,
    #[serde(serialize_with = "ser_p")]
    p: PNorm,
    n: usize,
    cardinality: usize,
    rmse: f64,
    test_points: usize,
    seed: u64,
}

fn ser_p<S: serde::Serializer>(p: &PNorm, s: S) -> std::result::Result<S::Ok, S::Error> {
    p_json(*p).serialize(s)
}

#[allow(clippy::too_many_arguments)]
fn approximate(
    name: &str,
    m: Option<usize>,
    degrees: &[usize],
    ps: &[PNorm],
    family: NodeFamily,
    test_points: usize,
    seed: u64,
    format: Format,
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
) -> Result<()> {
    let model = lookup(name, m)?;
    let mut records = Vec::new();
    for &p in ps {
        for &n in degrees {
            let (cardinality, rmse) = approximation_rmse(&model, n, p, family, test_points, seed)?;
            records.push(RmseRecord {
                model: model.name().to_string(),
                m: model.dim(),
                p,
                n,
                cardinality,
                rmse,
                test_points,
                seed,
            });
        }
    }
    let mut w = sink(out, stdout)?;
    match format {
        Format::Json => write_json(w, &records),
        Format::Csv => {
            writeln!(w, "model,m,p,n,cardinality,rmse")?;
            for r in &records {
                writeln!(w, "{},{},{},{},{},{}", r.model, r.m, r.p, r.n, r.cardinality, r.rmse)?;
            }
            w.flush()?;
            Ok(())
        }
        _ => {
            writeln!(w, "model {} m {} test_points {test_points} seed {seed}", model.name(), model.dim())?;
            writeln!(w, "p n cardinality rmse")?;
            for r in &records {
                writeln!(w, "{} {} {} {}", r.p, r.n, r.cardinality, sig6(r.rmse))?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
