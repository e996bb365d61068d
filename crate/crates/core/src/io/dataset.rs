use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::DataFormat;
use crate::metrics::{check_score, check_tag, Dataset, Label, LabeledExample};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadOptions {
    /// When false, rows without a score load with score `0.0` so the dataset
    /// can be scored afterwards.
    pub require_scores: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            require_scores: true,
        }
    }
}

/// Loads a scored dataset; every row needs a score.
pub fn load_dataset(path: impl AsRef<Path>, format: DataFormat) -> Result<Dataset> {
    load_dataset_with(path, format, LoadOptions::default())
}

pub fn load_dataset_with(
    path: impl AsRef<Path>,
    format: DataFormat,
    options: LoadOptions,
) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path)?;
    let mut rows = Rows::new(path, options);
    match format {
        DataFormat::Csv => read_csv(file, &mut rows)?,
        DataFormat::Jsonl => read_jsonl(file, &mut rows)?,
    }
    Dataset::new(rows.examples)
}

/// Writes a dataset that [`load_dataset`] reads back unchanged. Scores are
/// written in shortest round-trip form.
pub fn write_dataset(dataset: &Dataset, path: impl AsRef<Path>, format: DataFormat) -> Result<()> {
    write_dataset_to(dataset, BufWriter::new(File::create(path)?), format)
}

pub fn write_dataset_to(dataset: &Dataset, mut out: impl Write, format: DataFormat) -> Result<()> {
    match format {
        DataFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(["id", "score", "label", "subgroups", "text"])?;
            for e in dataset.examples() {
                let tags: Vec<&str> = e.subgroups.iter().map(String::as_str).collect();
                w.write_record([
                    e.id.as_str(),
                    &e.score.to_string(),
                    &e.label.as_u8().to_string(),
                    &tags.join("|"),
                    e.text.as_deref().unwrap_or(""),
                ])?;
            }
            w.flush()?;
        }
        DataFormat::Jsonl => {
            for e in dataset.examples() {
                let row = JsonRow {
                    id: e.id.clone(),
                    score: Some(e.score),
                    label: serde_json::Value::from(e.label.as_u8()),
                    subgroups: Tags::List(e.subgroups.iter().cloned().collect()),
                    text: e.text.clone(),
                };
                serde_json::to_writer(&mut out, &row)?;
                out.write_all(b"\n")?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

struct Rows<'p> {
    path: &'p Path,
    options: LoadOptions,
    examples: Vec<LabeledExample>,
    first_line: HashMap<String, usize>,
}

impl<'p> Rows<'p> {
    fn new(path: &'p Path, options: LoadOptions) -> Self {
        Self {
            path,
            options,
            examples: Vec::new(),
            first_line: HashMap::new(),
        }
    }

    fn parse_err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: PathBuf::from(self.path),
            line,
            message: message.into(),
        }
    }

    fn range_err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Range {
            path: PathBuf::from(self.path),
            line,
            message: message.into(),
        }
    }

    fn push(
        &mut self,
        line: usize,
        id: String,
        score: Option<f64>,
        label: i64,
        tags: Vec<String>,
        text: Option<String>,
    ) -> Result<()> {
        if id.is_empty() {
            return Err(self.parse_err(line, "empty id"));
        }
        let score = match score {
            Some(s) => {
                check_score(s).map_err(|e| self.range_err(line, e.to_string()))?;
                s
            }
            None if self.options.require_scores => {
                return Err(self.parse_err(line, "missing score"))
            }
            None => 0.0,
        };
        let label = u8::try_from(label)
            .ok()
            .and_then(Label::from_u8)
            .ok_or_else(|| self.range_err(line, format!("label {label} is not 0 or 1")))?;
        for t in &tags {
            check_tag(t).map_err(|e| self.parse_err(line, e.to_string()))?;
        }
        if let Some(first) = self.first_line.get(&id) {
            return Err(Error::DuplicateRecord {
                path: PathBuf::from(self.path),
                line,
                id,
                first_line: *first,
            });
        }
        self.first_line.insert(id.clone(), line);
        let mut example = LabeledExample::new(id, score, label).with_subgroups(tags);
        example.text = text;
        self.examples.push(example);
        Ok(())
    }
}

const REQUIRED: [&str; 3] = ["id", "score", "label"];

fn read_csv(file: File, rows: &mut Rows<'_>) -> Result<()> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let header = reader
        .headers()
        .map_err(|e| rows.parse_err(1, e.to_string()))?
        .clone();
    let column = |name: &str| header.iter().position(|h| h == name);
    for name in REQUIRED {
        if column(name).is_none() && !(name == "score" && !rows.options.require_scores) {
            return Err(rows.parse_err(1, format!("header lacks a `{name}` column")));
        }
    }
    let (id_col, label_col) = (column("id").unwrap(), column("label").unwrap());
    let (score_col, tags_col, text_col) = (column("score"), column("subgroups"), column("text"));

    let mut record = csv::StringRecord::new();
    loop {
        match reader.read_record(&mut record) {
            Ok(false) => break,
            Ok(true) => {}
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line() as usize);
                return Err(rows.parse_err(line, e.to_string()));
            }
        }
        let line = record.position().map_or(0, |p| p.line() as usize);
        let field = |c: Option<usize>| c.and_then(|c| record.get(c)).unwrap_or("");
        let id = field(Some(id_col)).to_string();
        let score = match field(score_col).trim() {
            "" => None,
            s => Some(
                s.parse::<f64>()
                    .map_err(|_| rows.parse_err(line, format!("score `{s}` is not a number")))?,
            ),
        };
        let label = match field(Some(label_col)).trim() {
            "0" => 0,
            "1" => 1,
            s => match s.parse::<i64>() {
                Ok(v) => v,
                Err(_) => {
                    return Err(rows.parse_err(line, format!("label `{s}` is not an integer")))
                }
            },
        };
        let tags = match field(tags_col) {
            "" => Vec::new(),
            s => s.split('|').map(str::to_string).collect(),
        };
        let text = match field(text_col) {
            "" => None,
            s => Some(s.to_string()),
        };
        rows.push(line, id, score, label, tags, text)?;
    }
    Ok(())
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Tags {
    List(Vec<String>),
    Joined(String),
}

impl Default for Tags {
    fn default() -> Self {
        Tags::List(Vec::new())
    }
}

#[derive(Serialize, Deserialize)]
struct JsonRow {
    id: String,
    #[serde(default)]
    score: Option<f64>,
    label: serde_json::Value,
    #[serde(default)]
    subgroups: Tags,
    #[serde(default)]
    text: Option<String>,
}

fn read_jsonl(file: File, rows: &mut Rows<'_>) -> Result<()> {
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: JsonRow =
            serde_json::from_str(&line).map_err(|e| rows.parse_err(line_no, e.to_string()))?;
        let label = row.label.as_i64().ok_or_else(|| {
            rows.parse_err(line_no, format!("label {} is not an integer", row.label))
        })?;
        let tags = match row.subgroups {
            Tags::List(v) => v,
            Tags::Joined(s) if s.is_empty() => Vec::new(),
            Tags::Joined(s) => s.split('|').map(str::to_string).collect(),
        };
        rows.push(line_no, row.id, row.score, label, tags, row.text)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use std::io::Write as _;

    use super::*;

    fn file(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn two_rows() {
        let f = file("id,score,label,subgroups,text\na,0.25,0,gay|white,hello\nb,0.75,1,,\n");
        let ds = load_dataset(f.path(), DataFormat::Csv).unwrap();
        assert_eq!(ds.len(), 2);
        assert!(ds.examples()[0].has_subgroup("white"));
        assert_eq!(ds.examples()[1].text, None);
        assert!(ds.examples()[1].subgroups.is_empty());
    }

    #[test]
    fn range_error_names_line() {
        let f = file("id,score,label,subgroups,text\na,0.25,0,,\nb,1.5,1,,\n");
        match load_dataset(f.path(), DataFormat::Csv) {
            Err(Error::Range { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        let f = file("id,score,label\na,0.25,2\n");
        assert!(matches!(
            load_dataset(f.path(), DataFormat::Csv),
            Err(Error::Range { line: 2, .. })
        ));
    }

    #[test]
    fn parse_errors_name_line() {
        let f = file("id,score,label\na,0.25,0\nb,abc,1\n");
        assert!(matches!(
            load_dataset(f.path(), DataFormat::Csv),
            Err(Error::Parse { line: 3, .. })
        ));
        let f = file("id,label\na,0\n");
        assert!(matches!(
            load_dataset(f.path(), DataFormat::Csv),
            Err(Error::Parse { line: 1, .. })
        ));
        let f = file("{\"id\":\"a\",\"score\":0.1,\"label\":0}\n\n{\"id\":\"b\",\"score\":0.1,\"label\":\"x\"}\n");
        assert!(matches!(
            load_dataset(f.path(), DataFormat::Jsonl),
            Err(Error::Parse { line: 3, .. })
        ));
        let f = file("id,score,label,subgroups\na,0.1,0,x||y\n");
        assert!(matches!(
            load_dataset(f.path(), DataFormat::Csv),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn duplicate_ids() {
        let f = file("id,score,label\na,0.1,0\nb,0.2,1\na,0.3,1\n");
        match load_dataset(f.path(), DataFormat::Csv) {
            Err(Error::DuplicateRecord {
                line,
                first_line,
                id,
                ..
            }) => {
                assert_eq!((line, first_line, id.as_str()), (4, 2, "a"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn quoted_multiline_text_keeps_line_numbers() {
        let f = file("id,score,label,subgroups,text\na,0.1,0,,\"two\nlines\"\nb,7,1,,\n");
        assert!(matches!(
            load_dataset(f.path(), DataFormat::Csv),
            Err(Error::Range { line: 4, .. })
        ));
    }

    #[test]
    fn unscored_rows() {
        let f = file("id,label,subgroups,text\na,0,gay,some text\n");
        assert!(load_dataset(f.path(), DataFormat::Csv).is_err());
        let ds = load_dataset_with(
            f.path(),
            DataFormat::Csv,
            LoadOptions {
                require_scores: false,
            },
        )
        .unwrap();
        assert_eq!(ds.examples()[0].score, 0.0);
        assert_eq!(ds.examples()[0].text.as_deref(), Some("some text"));
    }

    #[test]
    fn jsonl_accepts_joined_tags() {
        let f = file("{\"id\":\"a\",\"score\":0.5,\"label\":1,\"subgroups\":\"gay|white\"}\n");
        let ds = load_dataset(f.path(), DataFormat::Jsonl).unwrap();
        assert_eq!(ds.subgroups().collect::<Vec<_>>(), ["gay", "white"]);
    }
}
