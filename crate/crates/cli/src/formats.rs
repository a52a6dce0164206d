//! File formats: RDS sample CSV, degree-distribution CSV, and graph files.
//!
//! Sample CSV schema: header `id,recruiter_id,degree,outcome[,wave]`, UTF-8,
//! comma-separated, decimal point. An empty `recruiter_id` marks a seed.
//! When the `wave` column is absent, waves are reconstructed from the
//! recruiter links. Lines starting with `#` are comments (output files carry
//! the manifest hash in one).

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rds_ss::netgen::Graph;
use rds_ss::{IntDegreeDistribution, RdsRecord, RealSample};

use crate::errors::{CliError, CliResult};

fn parse_error(path: &Path, line: u64, msg: impl std::fmt::Display) -> CliError {
    CliError::io(format!("{}:{line}: {msg}", path.display()))
}

/// Reads a sample CSV; parse failures report the 1-based line number.
pub fn read_sample(path: &Path) -> CliResult<RealSample> {
    let file = File::open(path)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers = reader
        .headers()
        .map_err(|e| CliError::io(format!("{}: {e}", path.display())))?
        .clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(id_col), Some(rec_col), Some(deg_col), Some(out_col)) = (
        column("id"),
        column("recruiter_id"),
        column("degree"),
        column("outcome"),
    ) else {
        return Err(CliError::io(format!(
            "{}: header must contain id,recruiter_id,degree,outcome[,wave]",
            path.display()
        )));
    };
    let wave_col = column("wave");

    let mut records: Vec<RdsRecord<f64>> = Vec::new();
    let mut waves: HashMap<String, u32> = HashMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_error(path, line, &e)
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = |col: usize| -> CliResult<&str> {
            row.get(col)
                .ok_or_else(|| parse_error(path, line, format!("missing column {col}")))
        };
        let id = field(id_col)?.to_string();
        let recruiter = field(rec_col)?;
        let recruiter_id = if recruiter.is_empty() {
            None
        } else {
            Some(recruiter.to_string())
        };
        let degree: usize = field(deg_col)?
            .parse()
            .map_err(|e| parse_error(path, line, format!("bad degree: {e}")))?;
        let outcome: f64 = field(out_col)?
            .parse()
            .map_err(|e| parse_error(path, line, format!("bad outcome: {e}")))?;
        let wave: u32 = match wave_col {
            Some(col) => field(col)?
                .parse()
                .map_err(|e| parse_error(path, line, format!("bad wave: {e}")))?,
            None => match &recruiter_id {
                None => 0,
                Some(r) => waves.get(r).map_or(0, |w| w + 1),
            },
        };
        waves.insert(id.clone(), wave);
        records.push(RdsRecord {
            id,
            recruiter_id,
            degree,
            outcome,
            wave,
        });
    }
    Ok(RealSample::from_records(records))
}

pub fn write_sample<W: Write>(
    mut w: W,
    sample: &RealSample,
    manifest_tag: Option<&str>,
) -> CliResult<()> {
    if let Some(tag) = manifest_tag {
        writeln!(w, "# manifest {tag}")?;
    }
    writeln!(w, "id,recruiter_id,degree,outcome,wave")?;
    for r in sample.records() {
        writeln!(
            w,
            "{},{},{},{},{}",
            r.id,
            r.recruiter_id.as_deref().unwrap_or(""),
            r.degree,
            r.outcome,
            r.wave
        )?;
    }
    Ok(())
}

/// Degree-distribution CSV: header `degree,count`; the population size is
/// the count total.
pub fn read_distribution(path: &Path) -> CliResult<IntDegreeDistribution> {
    let file = File::open(path)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", path.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut counts = std::collections::BTreeMap::new();
    for row in reader.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_error(path, line, &e)
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let degree: usize = row
            .get(0)
            .unwrap_or("")
            .parse()
            .map_err(|e| parse_error(path, line, format!("bad degree: {e}")))?;
        let count: u64 = row
            .get(1)
            .unwrap_or("")
            .parse()
            .map_err(|e| parse_error(path, line, format!("bad count: {e}")))?;
        *counts.entry(degree).or_insert(0) += count;
    }
    let population: u64 = counts.values().sum();
    IntDegreeDistribution::from_counts(counts, population as usize).map_err(CliError::from)
}

pub fn write_distribution<W: Write>(
    mut w: W,
    dist: &IntDegreeDistribution,
    manifest_tag: Option<&str>,
) -> CliResult<()> {
    if let Some(tag) = manifest_tag {
        writeln!(w, "# manifest {tag}")?;
    }
    writeln!(w, "degree,count")?;
    for (&k, &c) in dist.counts() {
        writeln!(w, "{k},{c}")?;
    }
    Ok(())
}

/// Edge list: one `u v` pair per line, node ids 0-based.
pub fn write_edge_list<W: Write>(
    mut w: W,
    graph: &Graph,
    manifest_tag: Option<&str>,
) -> CliResult<()> {
    if let Some(tag) = manifest_tag {
        writeln!(w, "# manifest {tag}")?;
    }
    for &(u, v) in graph.edges() {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

/// Node attributes: `id,z,degree` per node.
pub fn write_node_attrs<W: Write>(
    mut w: W,
    graph: &Graph,
    manifest_tag: Option<&str>,
) -> CliResult<()> {
    if let Some(tag) = manifest_tag {
        writeln!(w, "# manifest {tag}")?;
    }
    writeln!(w, "id,z,degree")?;
    for v in 0..graph.node_count() as u32 {
        writeln!(
            w,
            "{v},{},{}",
            u8::from(graph.is_infected(v)),
            graph.degree(v)
        )?;
    }
    Ok(())
}

pub fn create_file(path: &Path) -> CliResult<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| {
        CliError::io(format!("cannot create {}: {e}", path.display()))
    })?))
}
