//! File formats.
//!
//! Three plain-text formats, specified exactly so files round-trip between
//! the simulators and the test commands:
//!
//! **Edge list** — one undirected edge per line as two 0-based integer node
//! ids separated by whitespace or a comma; blank lines and lines starting
//! with `#` are ignored. Writers emit `# source target` followed by one
//! `i j` line (single space, i < j) per edge in ascending order.
//!
//! **Coordinate CSV** — header required, first column `id`, remaining
//! columns are coordinate components (conventionally `x,y`); ids must be
//! exactly 0..n-1 in any order.
//!
//! **Attribute CSV** — header required, first column `id`, remaining
//! columns named attributes; ids must be exactly 0..n-1 in any order.
//! Node alignment is by id, and a missing id is a hard error — no
//! imputation.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::TidyRow;
use crate::weights::{CoordinateSet, WeightMatrix};

/// Read an undirected edge list.
pub fn read_edge_list(path: &Path) -> Result<Vec<(usize, usize)>> {
    let file = File::open(path)?;
    let mut edges = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let toks: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .collect();
        if toks.len() != 2 {
            return Err(Error::Parse(format!(
                "{}:{}: expected two node ids, got {:?}",
                path.display(),
                lineno + 1,
                trimmed
            )));
        }
        let a = toks[0].parse::<usize>().map_err(|_| {
            Error::Parse(format!(
                "{}:{}: invalid node id {:?}",
                path.display(),
                lineno + 1,
                toks[0]
            ))
        })?;
        let b = toks[1].parse::<usize>().map_err(|_| {
            Error::Parse(format!(
                "{}:{}: invalid node id {:?}",
                path.display(),
                lineno + 1,
                toks[1]
            ))
        })?;
        edges.push((a, b));
    }
    Ok(edges)
}

/// Write the positive entries of a weight matrix as an undirected edge
/// list (each unordered pair once, ascending). Weight magnitudes are not
/// representable in this format, so only use it for binary matrices.
pub fn write_edge_list(path: &Path, w: &WeightMatrix) -> Result<()> {
    let mut out = File::create(path)?;
    writeln!(out, "# source target")?;
    for (i, j, _) in w.entries() {
        if i < j || w.get(j, i) == 0.0 {
            let (a, b) = (i.min(j), i.max(j));
            writeln!(out, "{a} {b}")?;
        }
    }
    Ok(())
}

fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    csv::Reader::from_path(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn header_index(headers: &csv::StringRecord, name: &str, path: &Path) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| {
            Error::Parse(format!(
                "{}: no column named {:?} (have {:?})",
                path.display(),
                name,
                headers.iter().collect::<Vec<_>>()
            ))
        })
}

/// Collect (id, payload) rows and reorder them to id order 0..n-1,
/// rejecting duplicates and gaps.
fn by_node_id<T>(mut rows: Vec<(usize, T)>, path: &Path) -> Result<Vec<T>> {
    let n = rows.len();
    rows.sort_by_key(|r| r.0);
    for (expect, (id, _)) in rows.iter().enumerate() {
        if *id != expect {
            return Err(Error::Parse(format!(
                "{}: node ids must be exactly 0..{} (missing or duplicate id near {})",
                path.display(),
                n - 1,
                id
            )));
        }
    }
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

/// Read a coordinate CSV (`id,x,y,...`).
pub fn read_coordinates(path: &Path) -> Result<CoordinateSet> {
    let mut reader = open_csv(path)?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .clone();
    let id_col = header_index(&headers, "id", path)?;
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (lineno, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let id = record
            .get(id_col)
            .and_then(|v| v.trim().parse::<usize>().ok())
            .ok_or_else(|| {
                Error::Parse(format!("{}: row {}: bad id", path.display(), lineno + 2))
            })?;
        let mut coords = Vec::with_capacity(record.len() - 1);
        for (c, v) in record.iter().enumerate() {
            if c == id_col {
                continue;
            }
            let x = v.trim().parse::<f64>().map_err(|_| {
                Error::Parse(format!(
                    "{}: row {}: bad coordinate {:?}",
                    path.display(),
                    lineno + 2,
                    v
                ))
            })?;
            coords.push(x);
        }
        rows.push((id, coords));
    }
    CoordinateSet::new(by_node_id(rows, path)?)
}

const COORD_NAMES: [&str; 3] = ["x", "y", "z"];

/// Write a coordinate CSV.
pub fn write_coordinates(path: &Path, coords: &CoordinateSet) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let mut header = vec!["id".to_string()];
    for d in 0..coords.dim() {
        header.push(
            COORD_NAMES
                .get(d)
                .map(|s| s.to_string())
                .unwrap_or_else(|| format!("c{d}")),
        );
    }
    w.write_record(&header)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    for (id, point) in coords.points().iter().enumerate() {
        let mut rec = vec![id.to_string()];
        rec.extend(point.iter().map(|v| v.to_string()));
        w.write_record(&rec)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    w.flush()?;
    Ok(())
}

/// Read one named column of an attribute CSV as raw strings in node-id
/// order.
pub fn read_attribute_column(path: &Path, column: &str) -> Result<Vec<String>> {
    let mut reader = open_csv(path)?;
    let headers = reader
        .headers()
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?
        .clone();
    let id_col = header_index(&headers, "id", path)?;
    let val_col = header_index(&headers, column, path)?;
    let mut rows: Vec<(usize, String)> = Vec::new();
    for (lineno, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        let id = record
            .get(id_col)
            .and_then(|v| v.trim().parse::<usize>().ok())
            .ok_or_else(|| {
                Error::Parse(format!("{}: row {}: bad id", path.display(), lineno + 2))
            })?;
        let value = record.get(val_col).unwrap_or("").trim().to_string();
        if value.is_empty() {
            return Err(Error::Parse(format!(
                "{}: row {}: empty value for column {:?}",
                path.display(),
                lineno + 2,
                column
            )));
        }
        rows.push((id, value));
    }
    by_node_id(rows, path)
}

/// Write a single-column attribute CSV (`id,<name>`).
pub fn write_attribute_column<T: std::fmt::Display>(
    path: &Path,
    column: &str,
    values: &[T],
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    w.write_record([ "id", column ])
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    for (id, v) in values.iter().enumerate() {
        w.write_record([id.to_string(), v.to_string()])
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    w.flush()?;
    Ok(())
}

/// Write the per-replicate tidy CSV for an experiment.
pub fn write_tidy_csv(path: &Path, rows: &[TidyRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.serialize(row)
            .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::adjacency_from_edges;
    use std::io::Write as _;

    fn tmpfile(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn edge_list_accepts_comments_commas_and_whitespace() {
        let f = tmpfile("# header\n0 1\n1,2\n\n  2\t3\n");
        let edges = read_edge_list(f.path()).unwrap();
        assert_eq!(edges, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn edge_list_rejects_garbage() {
        let f = tmpfile("0 1 2\n");
        assert!(read_edge_list(f.path()).is_err());
        let f = tmpfile("0 x\n");
        assert!(read_edge_list(f.path()).is_err());
    }

    #[test]
    fn edge_list_round_trip_is_byte_stable() {
        let w = adjacency_from_edges(&[(2, 0), (0, 1), (1, 2)], 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p1 = dir.path().join("a.edges");
        let p2 = dir.path().join("b.edges");
        write_edge_list(&p1, &w).unwrap();
        let w2 = adjacency_from_edges(&read_edge_list(&p1).unwrap(), 3).unwrap();
        assert_eq!(w, w2);
        write_edge_list(&p2, &w2).unwrap();
        assert_eq!(std::fs::read(&p1).unwrap(), std::fs::read(&p2).unwrap());
    }

    #[test]
    fn coordinates_round_trip_and_id_validation() {
        let f = tmpfile("id,x,y\n1,4.5,0.25\n0,-1.0,2.0\n");
        let c = read_coordinates(f.path()).unwrap();
        assert_eq!(c.points()[0], vec![-1.0, 2.0]);
        assert_eq!(c.points()[1], vec![4.5, 0.25]);

        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        write_coordinates(&p, &c).unwrap();
        assert_eq!(read_coordinates(&p).unwrap(), c);

        let gap = tmpfile("id,x,y\n0,0,0\n2,1,1\n");
        assert!(read_coordinates(gap.path()).is_err());
        let dup = tmpfile("id,x,y\n0,0,0\n0,1,1\n");
        assert!(read_coordinates(dup.path()).is_err());
    }

    #[test]
    fn attribute_column_by_name_with_missing_id_rejected() {
        let f = tmpfile("id,sbp,group\n0,120.5,a\n2,131.0,b\n1,118.0,a\n");
        let sbp = read_attribute_column(f.path(), "sbp").unwrap();
        assert_eq!(sbp, vec!["120.5", "118.0", "131.0"]);
        assert!(read_attribute_column(f.path(), "nope").is_err());

        let missing = tmpfile("id,sbp\n0,120\n2,130\n");
        assert!(read_attribute_column(missing.path(), "sbp").is_err());
    }
}
