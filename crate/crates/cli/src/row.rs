//! Output rows and their CSV encoding.

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use crate::bound::Bound;
use crate::error::{CliError, Result};

/// Exact CSV header line.
pub const HEADER: [&str; 10] = [
    "snr_db",
    "T",
    "n",
    "L",
    "epsilon",
    "bound",
    "rate_bits_per_cu",
    "stderr_bits",
    "n_samples",
    "seed",
];

/// One evaluated bound at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    /// SNR in dB as given by the user.
    pub snr_db: f64,
    /// Coherence time.
    pub t: u32,
    /// Block-length actually used. Zero for asymptotic rows outside a
    /// fixed-n sweep.
    pub n: usize,
    /// Coherence blocks per codeword.
    pub blocks: usize,
    /// Target error probability.
    pub epsilon: f64,
    /// Which bound.
    pub bound: Bound,
    /// Rate in bits per channel use.
    pub rate_bits_per_cu: f64,
    /// Monte Carlo standard error of the rate, bits per channel use.
    pub stderr_bits: Option<f64>,
    /// Monte Carlo sample count.
    pub n_samples: Option<u64>,
    /// Seed of the Monte Carlo substreams.
    pub seed: Option<u64>,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl SweepRow {
    fn record(&self) -> [String; 10] {
        [
            self.snr_db.to_string(),
            self.t.to_string(),
            self.n.to_string(),
            self.blocks.to_string(),
            self.epsilon.to_string(),
            self.bound.to_string(),
            self.rate_bits_per_cu.to_string(),
            opt(self.stderr_bits),
            opt(self.n_samples),
            opt(self.seed),
        ]
    }
}

/// Writes the header and `rows` to `sink`; `label` names the sink in errors.
pub fn write_csv<W: Write>(rows: &[SweepRow], sink: W, label: &Path) -> Result<()> {
    let csv_err = |source| CliError::Csv {
        path: label.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(sink);
    w.write_record(HEADER).map_err(csv_err)?;
    for row in rows {
        w.write_record(row.record()).map_err(csv_err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: label.to_path_buf(),
        source,
    })
}

/// Writes `rows` to `destination`, or to standard output when it is `-`.
pub fn emit_csv(rows: &[SweepRow], destination: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(CliError::Usage("nothing to write: no rows were produced".into()));
    }
    if destination == Path::new("-") {
        return write_csv(rows, io::stdout().lock(), destination);
    }
    let file = File::create(destination).map_err(|source| CliError::Io {
        path: destination.to_path_buf(),
        source,
    })?;
    write_csv(rows, io::BufWriter::new(file), destination)
}

fn field<T: std::str::FromStr>(raw: &str, name: &str, path: &Path, line: usize) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    raw.parse().map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: format!("{name} = `{raw}`: {e}"),
    })
}

fn opt_field<T: std::str::FromStr>(raw: &str, name: &str, path: &Path, line: usize) -> Result<Option<T>>
where
    T::Err: std::fmt::Display,
{
    if raw.is_empty() {
        Ok(None)
    } else {
        field(raw, name, path, line).map(Some)
    }
}

/// Parses CSV produced by [`write_csv`].
pub fn parse_csv<R: Read>(source: R, label: &Path) -> Result<Vec<SweepRow>> {
    let path: PathBuf = label.to_path_buf();
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = r.headers().map_err(|source| CliError::Csv {
        path: path.clone(),
        source,
    })?;
    if header.iter().ne(HEADER.iter().copied()) {
        return Err(CliError::Parse {
            path,
            line: 1,
            message: format!("unexpected header `{}`", header.iter().collect::<Vec<_>>().join(",")),
        });
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|source| CliError::Csv {
            path: path.clone(),
            source,
        })?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        let bound = f(5).parse::<Bound>().map_err(|message| CliError::Parse {
            path: path.clone(),
            line,
            message,
        })?;
        rows.push(SweepRow {
            snr_db: field(f(0), "snr_db", &path, line)?,
            t: field(f(1), "T", &path, line)?,
            n: field(f(2), "n", &path, line)?,
            blocks: field(f(3), "L", &path, line)?,
            epsilon: field(f(4), "epsilon", &path, line)?,
            bound,
            rate_bits_per_cu: field(f(6), "rate_bits_per_cu", &path, line)?,
            stderr_bits: opt_field(f(7), "stderr_bits", &path, line)?,
            n_samples: opt_field(f(8), "n_samples", &path, line)?,
            seed: opt_field(f(9), "seed", &path, line)?,
        });
    }
    Ok(rows)
}

/// Reads a CSV file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(io::BufReader::new(file), path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn closed_form_row() -> SweepRow {
        SweepRow {
            snr_db: 10.0,
            t: 50,
            n: 0,
            blocks: 0,
            epsilon: 1e-3,
            bound: Bound::CCoh,
            rate_bits_per_cu: 2.906_514_8,
            stderr_bits: None,
            n_samples: None,
            seed: None,
        }
    }

    fn to_string(rows: &[SweepRow]) -> String {
        let mut buf = Vec::new();
        write_csv(rows, &mut buf, Path::new("-")).unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn closed_form_row_has_empty_optionals() {
        let text = to_string(&[closed_form_row()]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "snr_db,T,n,L,epsilon,bound,rate_bits_per_cu,stderr_bits,n_samples,seed");
        assert_eq!(lines[1], "10,50,0,0,0.001,C_coh,2.9065148,,,");
        assert!(text.ends_with('\n'));
        assert_eq!(text.matches("snr_db").count(), 1);
    }

    #[test]
    fn rejects_foreign_header() {
        let text = "a,b\n1,2\n";
        assert!(matches!(
            parse_csv(text.as_bytes(), Path::new("x.csv")),
            Err(CliError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn bad_field_reports_line() {
        let mut text = to_string(&[closed_form_row()]);
        text.push_str("10,5x,0,0,0.001,C_coh,1,,,\n");
        match parse_csv(text.as_bytes(), Path::new("y.csv")) {
            Err(CliError::Parse { line, message, .. }) => {
                assert_eq!(line, 3);
                assert!(message.contains("T"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn empty_row_set_is_refused() {
        assert!(matches!(emit_csv(&[], Path::new("-")), Err(CliError::Usage(_))));
    }

    #[test]
    fn io_errors_name_the_path() {
        let err = emit_csv(&[closed_form_row()], Path::new("/nonexistent-dir/out.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.csv"));
    }

    fn any_row() -> impl Strategy<Value = SweepRow> {
        (
            -30.0f64..40.0,
            1u32..500,
            0usize..100_000,
            0usize..10_000,
            1e-9f64..1.0,
            0usize..7,
            -1e3f64..1e3,
            proptest::option::of(0.0f64..1.0),
            proptest::option::of(any::<u64>()),
            proptest::option::of(any::<u64>()),
        )
            .prop_map(|(snr_db, t, n, blocks, epsilon, b, rate, se, ns, seed)| SweepRow {
                snr_db,
                t,
                n,
                blocks,
                epsilon,
                bound: Bound::ALL[b],
                rate_bits_per_cu: rate,
                stderr_bits: se,
                n_samples: ns,
                seed,
            })
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_lossless(rows in proptest::collection::vec(any_row(), 1..20)) {
            let text = to_string(&rows);
            let back = parse_csv(text.as_bytes(), Path::new("-")).unwrap();
            prop_assert_eq!(back, rows);
        }
    }
}
