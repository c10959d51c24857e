//! GeoLingIt-format TSV ingestion: parsing, subtask merging, validation,
//! and label statistics.
//!
//! The data arrives as tab-separated UTF-8 lines without a header (a header
//! can be skipped on request). Subtask A files carry `id, text, region`,
//! subtask B files carry `id, text, lat, lon`, and merged files carry all
//! five columns. Coordinates are serialized with the minimal decimal
//! representation that round-trips the stored `f64`, which echoes typical
//! gold files byte-for-byte and makes `parse ∘ serialize` the identity on
//! valid records.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::regions::Region;

/// Italy's gold-data bounding box: latitude range, then longitude range.
/// Points outside it are suspicious but not invalid (warn, don't reject).
pub const ITALY_BBOX: ((f64, f64), (f64, f64)) = ((35.0, 48.0), (6.0, 19.0));

/// Official split sizes of the GeoLingIt dataset (train / eval / test).
pub const OFFICIAL_SPLIT_SIZES: (usize, usize, usize) = (13669, 552, 818);

/// One social-media post with its gold region and gold coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub text: String,
    pub region: Region,
    pub lat: f64,
    pub lon: f64,
}

impl Record {
    /// Build a record, enforcing the hard invariants: nonempty id and
    /// finite coordinates in [-90, 90] × [-180, 180]. Text content is
    /// unconstrained here; the TSV serializer rejects what it cannot
    /// represent.
    pub fn new(
        id: impl Into<String>,
        text: impl Into<String>,
        region: Region,
        lat: f64,
        lon: f64,
    ) -> Result<Record, IngestError> {
        let id = id.into();
        let text = text.into();
        if id.is_empty() {
            return Err(IngestError::EmptyId { line: 0 });
        }
        if !lat.is_finite() || !(-90.0..=90.0).contains(&lat) {
            return Err(IngestError::CoordinateRange { id, axis: "lat", value: lat });
        }
        if !lon.is_finite() || !(-180.0..=180.0).contains(&lon) {
            return Err(IngestError::CoordinateRange { id, axis: "lon", value: lon });
        }
        Ok(Record { id, text, region, lat, lon })
    }

    /// Whether the gold point falls inside Italy's bounding box.
    pub fn in_italy_bbox(&self) -> bool {
        let ((lat_min, lat_max), (lon_min, lon_max)) = ITALY_BBOX;
        (lat_min..=lat_max).contains(&self.lat) && (lon_min..=lon_max).contains(&self.lon)
    }
}

/// Which columns a TSV file is expected to carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schema {
    /// `id, text, region`
    SubtaskA,
    /// `id, text, lat, lon`
    SubtaskB,
    /// `id, text, region, lat, lon`
    Merged,
}

impl Schema {
    fn field_count(self) -> usize {
        match self {
            Schema::SubtaskA => 3,
            Schema::SubtaskB => 4,
            Schema::Merged => 5,
        }
    }
}

/// Strict aborts on the first malformed line; lenient skips it and records
/// a warning. Scoring paths should stay strict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    Lenient,
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub mode: ParseMode,
    /// Skip one header line before the data.
    pub skip_header: bool,
}

/// A parsed TSV line. Region and coordinates are present according to the
/// schema the file was parsed under; `line` is 1-based for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub line: usize,
    pub id: String,
    pub text: String,
    pub region: Option<Region>,
    pub coords: Option<(f64, f64)>,
}

/// Output of [`parse_tsv`]: rows in file order plus any lenient-mode or
/// bounding-box warnings.
#[derive(Debug, Default)]
pub struct TsvParse {
    pub rows: Vec<RawRow>,
    pub warnings: Vec<String>,
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("line {line}: expected {expected} tab-separated fields, found {found}")]
    FieldCount { line: usize, expected: usize, found: usize },
    #[error("line {line}: empty id")]
    EmptyId { line: usize },
    #[error("line {line}: non-numeric coordinate {field:?}")]
    BadCoordinate { line: usize, field: String },
    #[error("line {line}: unknown region {field:?}")]
    UnknownRegionLabel { line: usize, field: String },
    #[error("record {id}: {axis} = {value} outside valid range")]
    CoordinateRange { id: String, axis: &'static str, value: f64 },
    #[error("record {id}: text contains tab or line break, not TSV-representable")]
    UnrepresentableText { id: String },
    #[error("duplicate id {id} (ids must be unique within a split)")]
    DuplicateId { id: String },
    #[error("conflicting texts for id {id}")]
    ConflictingText { id: String },
    #[error("conflicting {what} for id {id}")]
    ConflictingField { id: String, what: &'static str },
    #[error("empty input: {context}")]
    EmptyInput { context: &'static str },
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

/// Parse a TSV stream under the given schema. Rows come back in file order
/// with line numbers preserved; empty lines are skipped. LF and CRLF line
/// endings are both accepted.
pub fn parse_tsv(
    reader: impl BufRead,
    schema: Schema,
    opts: &ParseOptions,
) -> Result<TsvParse, IngestError> {
    let mut out = TsvParse::default();
    let expected = schema.field_count();

    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let raw = line?;
        let raw = raw.strip_suffix('\r').unwrap_or(&raw);
        if opts.skip_header && idx == 0 {
            continue;
        }
        if raw.is_empty() {
            continue;
        }
        match parse_line(raw, line_no, schema, expected) {
            Ok(row) => {
                if let Some((lat, lon)) = row.coords {
                    let ((lat_min, lat_max), (lon_min, lon_max)) = ITALY_BBOX;
                    if !((lat_min..=lat_max).contains(&lat) && (lon_min..=lon_max).contains(&lon)) {
                        out.warnings.push(format!(
                            "line {line_no}: id {} at ({lat}, {lon}) outside Italy bounding box",
                            row.id
                        ));
                    }
                }
                out.rows.push(row);
            }
            Err(err) => match opts.mode {
                ParseMode::Strict => return Err(err),
                ParseMode::Lenient => out.warnings.push(format!("skipped: {err}")),
            },
        }
    }
    Ok(out)
}

fn parse_line(
    raw: &str,
    line_no: usize,
    schema: Schema,
    expected: usize,
) -> Result<RawRow, IngestError> {
    let fields: Vec<&str> = raw.split('\t').collect();
    if fields.len() != expected {
        return Err(IngestError::FieldCount { line: line_no, expected, found: fields.len() });
    }
    let id = fields[0].trim();
    if id.is_empty() {
        return Err(IngestError::EmptyId { line: line_no });
    }
    let text = fields[1].to_string();

    let parse_region = |field: &str| {
        Region::resolve(field).ok_or_else(|| IngestError::UnknownRegionLabel {
            line: line_no,
            field: field.to_string(),
        })
    };
    let parse_coord = |field: &str| {
        field
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| IngestError::BadCoordinate { line: line_no, field: field.to_string() })
    };

    let (region, coords) = match schema {
        Schema::SubtaskA => (Some(parse_region(fields[2])?), None),
        Schema::SubtaskB => {
            (None, Some((parse_coord(fields[2])?, parse_coord(fields[3])?)))
        }
        Schema::Merged => (
            Some(parse_region(fields[2])?),
            Some((parse_coord(fields[3])?, parse_coord(fields[4])?)),
        ),
    };

    Ok(RawRow { line: line_no, id: id.to_string(), text, region, coords })
}

/// Serialize records in the merged schema. Coordinates use the shortest
/// decimal representation that round-trips the value. Texts containing
/// tabs or line breaks cannot be represented and are rejected.
pub fn serialize_tsv(records: &[Record], mut writer: impl Write) -> Result<(), IngestError> {
    for r in records {
        if r.text.contains(['\t', '\n', '\r']) {
            return Err(IngestError::UnrepresentableText { id: r.id.clone() });
        }
        writeln!(writer, "{}\t{}\t{}\t{}\t{}", r.id, r.text, r.region, r.lat, r.lon)?;
    }
    Ok(())
}

/// Outcome of a merge: completed records sorted by id, plus ids that were
/// present on one side only (dropped with a warning by default).
#[derive(Debug, Default)]
pub struct MergeOutput {
    pub records: Vec<Record>,
    pub unmatched: Vec<String>,
    pub warnings: Vec<String>,
}

#[derive(Default)]
struct PartialEntry {
    text: String,
    region: Option<Region>,
    coords: Option<(f64, f64)>,
}

/// Join the subtask-A rows (region) with the subtask-B rows (coordinates)
/// on id. The merge is symmetric in its two arguments: each side simply
/// contributes whatever fields it carries, so `merge(a, b)` and
/// `merge(b, a)` produce the same record set. Texts for the same id must
/// agree after whitespace normalization; duplicate contributions of the
/// same field for one id are rejected.
pub fn merge_subtasks(a: &[RawRow], b: &[RawRow]) -> Result<MergeOutput, IngestError> {
    let mut entries: BTreeMap<String, PartialEntry> = BTreeMap::new();

    for row in a.iter().chain(b.iter()) {
        let entry = entries.entry(row.id.clone()).or_insert_with(|| PartialEntry {
            text: row.text.clone(),
            ..PartialEntry::default()
        });
        if normalize_text(&entry.text) != normalize_text(&row.text) {
            return Err(IngestError::ConflictingText { id: row.id.clone() });
        }
        // Texts may differ in whitespace only; keep the lexicographically
        // smaller spelling so the merge is symmetric in its arguments.
        if row.text < entry.text {
            entry.text = row.text.clone();
        }
        if let Some(region) = row.region {
            match entry.region {
                None => entry.region = Some(region),
                Some(existing) if existing == region => {
                    return Err(IngestError::DuplicateId { id: row.id.clone() })
                }
                Some(_) => {
                    return Err(IngestError::ConflictingField { id: row.id.clone(), what: "region" })
                }
            }
        }
        if let Some(coords) = row.coords {
            match entry.coords {
                None => entry.coords = Some(coords),
                Some(existing) if existing == coords => {
                    return Err(IngestError::DuplicateId { id: row.id.clone() })
                }
                Some(_) => {
                    return Err(IngestError::ConflictingField {
                        id: row.id.clone(),
                        what: "coordinates",
                    })
                }
            }
        }
    }

    let mut out = MergeOutput::default();
    for (id, entry) in entries {
        match (entry.region, entry.coords) {
            (Some(region), Some((lat, lon))) => {
                out.records.push(Record::new(id, entry.text, region, lat, lon)?);
            }
            _ => {
                out.warnings.push(format!("unmatched id {id}: present in only one subtask"));
                out.unmatched.push(id);
            }
        }
    }
    Ok(out)
}

fn normalize_text(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// The train/eval/test portions of a dataset.
#[derive(Debug, Clone, Default)]
pub struct DatasetSplit {
    pub train: Vec<Record>,
    pub eval: Vec<Record>,
    pub test: Vec<Record>,
}

impl DatasetSplit {
    /// Splits must be disjoint by id; returns the first id found in two
    /// splits.
    pub fn check_disjoint(&self) -> Result<(), IngestError> {
        let mut seen = std::collections::BTreeSet::new();
        for record in self.train.iter().chain(&self.eval).chain(&self.test) {
            if !seen.insert(record.id.as_str()) {
                return Err(IngestError::DuplicateId { id: record.id.clone() });
            }
        }
        Ok(())
    }

    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train.len(), self.eval.len(), self.test.len())
    }

    /// Whether the sizes match the official release.
    pub fn has_official_sizes(&self) -> bool {
        self.sizes() == OFFICIAL_SPLIT_SIZES
    }
}

/// Per-region counts and fractions over a split. Every one of the 20
/// regions is listed, absent ones with count 0.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LabelDistribution {
    pub n: usize,
    pub per_region: BTreeMap<Region, LabelShare>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelShare {
    pub count: usize,
    pub fraction: f64,
}

impl LabelDistribution {
    pub fn share(&self, region: Region) -> LabelShare {
        self.per_region[&region]
    }

    /// Regions sorted by descending count, canonical order breaking ties
    /// (the ordering of the label-frequency bar chart).
    pub fn by_descending_count(&self) -> Vec<(Region, LabelShare)> {
        let mut entries: Vec<_> = self.per_region.iter().map(|(r, s)| (*r, *s)).collect();
        entries.sort_by(|a, b| b.1.count.cmp(&a.1.count).then(a.0.cmp(&b.0)));
        entries
    }
}

/// Count records per region and the corresponding fraction of the split.
pub fn compute_stats(records: &[Record]) -> Result<LabelDistribution, IngestError> {
    if records.is_empty() {
        return Err(IngestError::EmptyInput { context: "compute_stats" });
    }
    let mut counts: BTreeMap<Region, usize> = Region::ALL.iter().map(|&r| (r, 0)).collect();
    for r in records {
        *counts.get_mut(&r.region).expect("all regions preseeded") += 1;
    }
    let n = records.len();
    let per_region = counts
        .into_iter()
        .map(|(region, count)| {
            (region, LabelShare { count, fraction: count as f64 / n as f64 })
        })
        .collect();
    Ok(LabelDistribution { n, per_region })
}

/// Ids must be unique; returns the first duplicate found.
pub fn check_unique_ids(rows: &[RawRow]) -> Result<(), IngestError> {
    let mut seen = std::collections::BTreeSet::new();
    for row in rows {
        if !seen.insert(row.id.as_str()) {
            return Err(IngestError::DuplicateId { id: row.id.clone() });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(input: &str, schema: Schema) -> Result<TsvParse, IngestError> {
        parse_tsv(Cursor::new(input), schema, &ParseOptions::default())
    }

    #[test]
    fn parses_dataset_sample_row() {
        let input =
            "280\t[USER] A suma bin ciapa'! meglio alleggerire un attimo\tPiemonte\t45.0729\t7.6758\n";
        let parsed = parse(input, Schema::Merged).unwrap();
        assert_eq!(parsed.rows.len(), 1);
        let row = &parsed.rows[0];
        assert_eq!(row.id, "280");
        assert_eq!(row.text, "[USER] A suma bin ciapa'! meglio alleggerire un attimo");
        assert_eq!(row.region, Some(Region::Piemonte));
        assert_eq!(row.coords, Some((45.0729, 7.6758)));
        assert!(parsed.warnings.is_empty());
    }

    #[test]
    fn empty_input_yields_empty_list() {
        let parsed = parse("", Schema::Merged).unwrap();
        assert!(parsed.rows.is_empty());
    }

    #[test]
    fn wrong_field_count_reports_line() {
        let input = "1\tok\tLazio\t41.9\t12.5\n2\tshort\tLazio\t41.9\n";
        let err = parse(input, Schema::Merged).unwrap_err();
        match err {
            IngestError::FieldCount { line, expected, found } => {
                assert_eq!((line, expected, found), (2, 5, 4));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn bad_coordinate_reports_field() {
        let input = "1\ttext\tLazio\tnope\t12.5\n";
        match parse(input, Schema::Merged).unwrap_err() {
            IngestError::BadCoordinate { line: 1, field } => assert_eq!(field, "nope"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn unknown_region_reports_field() {
        let input = "1\ttext\tPadania\n";
        match parse(input, Schema::SubtaskA).unwrap_err() {
            IngestError::UnknownRegionLabel { line: 1, field } => assert_eq!(field, "Padania"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn lenient_mode_skips_and_warns() {
        let input = "1\tok\tLazio\n2\tbad\tAtlantide\n3\tok\tVeneto\n";
        let opts = ParseOptions { mode: ParseMode::Lenient, ..Default::default() };
        let parsed = parse_tsv(Cursor::new(input), Schema::SubtaskA, &opts).unwrap();
        assert_eq!(parsed.rows.len(), 2);
        assert_eq!(parsed.warnings.len(), 1);
        assert!(parsed.warnings[0].contains("Atlantide"));
    }

    #[test]
    fn crlf_and_header_handling() {
        let input = "id\ttext\tregion\r\n1\tciao\tLazio\r\n";
        let opts = ParseOptions { skip_header: true, ..Default::default() };
        let parsed = parse_tsv(Cursor::new(input), Schema::SubtaskA, &opts).unwrap();
        assert_eq!(parsed.rows.len(), 1);
        assert_eq!(parsed.rows[0].id, "1");
    }

    #[test]
    fn out_of_bbox_warns_but_keeps_row() {
        let input = "1\ttext\tLazio\t51.5\t-0.1\n";
        let parsed = parse(input, Schema::Merged).unwrap();
        assert_eq!(parsed.rows.len(), 1);
        assert_eq!(parsed.warnings.len(), 1);
    }

    fn a_row(id: &str, text: &str, region: Region) -> RawRow {
        RawRow { line: 0, id: id.into(), text: text.into(), region: Some(region), coords: None }
    }

    fn b_row(id: &str, text: &str, lat: f64, lon: f64) -> RawRow {
        RawRow { line: 0, id: id.into(), text: text.into(), region: None, coords: Some((lat, lon)) }
    }

    #[test]
    fn merge_joins_on_id() {
        let text = "[USER] Ce ripigliamm tutt chell ch è o nuost";
        let a = vec![a_row("286", text, Region::Campania)];
        let b = vec![b_row("286", text, 40.8541, 14.2435)];
        let merged = merge_subtasks(&a, &b).unwrap();
        assert_eq!(merged.records.len(), 1);
        let r = &merged.records[0];
        assert_eq!(r.id, "286");
        assert_eq!(r.region, Region::Campania);
        assert_eq!((r.lat, r.lon), (40.8541, 14.2435));
        assert!(merged.unmatched.is_empty());
    }

    #[test]
    fn merge_of_empty_inputs_is_empty() {
        let merged = merge_subtasks(&[], &[]).unwrap();
        assert!(merged.records.is_empty());
        assert!(merged.unmatched.is_empty());
    }

    #[test]
    fn merge_reports_unmatched_ids() {
        let a = vec![a_row("7", "solo qui", Region::Puglia)];
        let merged = merge_subtasks(&a, &[]).unwrap();
        assert!(merged.records.is_empty());
        assert_eq!(merged.unmatched, vec!["7".to_string()]);
        assert_eq!(merged.warnings.len(), 1);
    }

    #[test]
    fn merge_is_symmetric() {
        let a = vec![
            a_row("1", "primo", Region::Lazio),
            a_row("2", "secondo", Region::Veneto),
        ];
        let b = vec![
            b_row("2", "secondo", 45.5, 12.0),
            b_row("1", "primo", 41.9, 12.5),
        ];
        let ab = merge_subtasks(&a, &b).unwrap();
        let ba = merge_subtasks(&b, &a).unwrap();
        assert_eq!(ab.records, ba.records);
        assert_eq!(ab.records.len(), 2);
        assert_eq!(ab.records[0].id, "1", "output sorted by id");
    }

    #[test]
    fn merge_rejects_conflicting_texts() {
        let a = vec![a_row("1", "una cosa", Region::Lazio)];
        let b = vec![b_row("1", "altra cosa", 41.9, 12.5)];
        match merge_subtasks(&a, &b).unwrap_err() {
            IngestError::ConflictingText { id } => assert_eq!(id, "1"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn merge_tolerates_whitespace_differences_in_text() {
        let a = vec![a_row("1", "ciao  mondo", Region::Lazio)];
        let b = vec![b_row("1", "ciao mondo ", 41.9, 12.5)];
        let ab = merge_subtasks(&a, &b).unwrap();
        let ba = merge_subtasks(&b, &a).unwrap();
        assert_eq!(ab.records.len(), 1);
        // Symmetric even when the raw spellings differ in whitespace.
        assert_eq!(ab.records, ba.records);
    }

    #[test]
    fn merge_rejects_duplicate_ids_within_one_side() {
        let a = vec![
            a_row("1", "ciao", Region::Lazio),
            a_row("1", "ciao", Region::Lazio),
        ];
        match merge_subtasks(&a, &[]).unwrap_err() {
            IngestError::DuplicateId { id } => assert_eq!(id, "1"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn roundtrip_serialize_then_parse() {
        let records = vec![
            Record::new("280", "[USER] A suma bin ciapa'!", Region::Piemonte, 45.0729, 7.6758)
                .unwrap(),
            Record::new("500", "[USER] [USER] Sta bon, vecio!", Region::Veneto, 46.1572, 12.2865)
                .unwrap(),
            Record::new("x9", "coordinate strane", Region::Molise, 41.0 + 1.0 / 3.0, 14.5).unwrap(),
        ];
        let mut buf = Vec::new();
        serialize_tsv(&records, &mut buf).unwrap();
        let parsed = parse(std::str::from_utf8(&buf).unwrap(), Schema::Merged).unwrap();
        let reparsed: Vec<Record> = parsed
            .rows
            .iter()
            .map(|row| {
                let (lat, lon) = row.coords.unwrap();
                Record::new(row.id.clone(), row.text.clone(), row.region.unwrap(), lat, lon)
                    .unwrap()
            })
            .collect();
        assert_eq!(records, reparsed);

        // Field-exact: serializing the reparsed records reproduces the bytes.
        let mut buf2 = Vec::new();
        serialize_tsv(&reparsed, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn roundtrip_holds_on_random_records() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(17);
        let texts = ["ciao", "[USER] però!", "perché no", "è così", "a b  c"];
        for _ in 0..200 {
            let records: Vec<Record> = (0..rng.gen_range(1..20))
                .map(|i| {
                    Record::new(
                        format!("id{i}"),
                        texts[rng.gen_range(0..texts.len())],
                        Region::ALL[rng.gen_range(0..20)],
                        rng.gen_range(-90.0..=90.0),
                        rng.gen_range(-180.0..=180.0),
                    )
                    .unwrap()
                })
                .collect();
            let mut buf = Vec::new();
            serialize_tsv(&records, &mut buf).unwrap();
            let parsed = parse(std::str::from_utf8(&buf).unwrap(), Schema::Merged).unwrap();
            let reparsed: Vec<Record> = parsed
                .rows
                .into_iter()
                .map(|row| {
                    let (lat, lon) = row.coords.unwrap();
                    Record::new(row.id, row.text, row.region.unwrap(), lat, lon).unwrap()
                })
                .collect();
            assert_eq!(records, reparsed);
            let mut buf2 = Vec::new();
            serialize_tsv(&reparsed, &mut buf2).unwrap();
            assert_eq!(buf, buf2);
        }
    }

    #[test]
    fn split_disjointness() {
        let rec = |id: &str| Record::new(id, "t", Region::Lazio, 41.9, 12.5).unwrap();
        let split = DatasetSplit {
            train: vec![rec("1"), rec("2")],
            eval: vec![rec("3")],
            test: vec![rec("4")],
        };
        assert!(split.check_disjoint().is_ok());
        assert_eq!(split.sizes(), (2, 1, 1));
        assert!(!split.has_official_sizes());

        let overlapping = DatasetSplit {
            train: vec![rec("1")],
            eval: vec![rec("1")],
            test: vec![],
        };
        assert!(matches!(
            overlapping.check_disjoint(),
            Err(IngestError::DuplicateId { id }) if id == "1"
        ));
    }

    #[test]
    fn stats_single_region() {
        let records: Vec<Record> = (0..3)
            .map(|i| Record::new(format!("{i}"), "eh", Region::Veneto, 45.5, 11.9).unwrap())
            .collect();
        let stats = compute_stats(&records).unwrap();
        assert_eq!(stats.share(Region::Veneto), LabelShare { count: 3, fraction: 1.0 });
        assert_eq!(stats.share(Region::Lazio), LabelShare { count: 0, fraction: 0.0 });
        assert_eq!(stats.per_region.len(), 20);
    }

    #[test]
    fn stats_hand_counted_fractions() {
        let mk = |i: usize, region| {
            Record::new(format!("{i}"), "t", region, 41.9, 12.5).unwrap()
        };
        let records = vec![
            mk(0, Region::Lazio),
            mk(1, Region::Lazio),
            mk(2, Region::Campania),
            mk(3, Region::Puglia),
        ];
        let stats = compute_stats(&records).unwrap();
        assert_eq!(stats.share(Region::Lazio).fraction, 0.5);
        assert_eq!(stats.share(Region::Campania).fraction, 0.25);
        assert_eq!(stats.share(Region::Puglia).fraction, 0.25);
    }

    #[test]
    fn stats_fractions_sum_to_one() {
        let regions = [Region::Lazio, Region::Campania, Region::Sicilia, Region::Molise];
        let records: Vec<Record> = (0..37)
            .map(|i| {
                Record::new(format!("{i}"), "t", regions[i % regions.len()], 41.0, 13.0).unwrap()
            })
            .collect();
        let stats = compute_stats(&records).unwrap();
        let total: f64 = stats.per_region.values().map(|s| s.fraction).sum();
        assert!((total - 1.0).abs() < 1e-9);
        let count_sum: usize = stats.per_region.values().map(|s| s.count).sum();
        assert_eq!(count_sum, 37);
    }

    #[test]
    fn stats_rejects_empty_input() {
        assert!(matches!(compute_stats(&[]), Err(IngestError::EmptyInput { .. })));
    }

    #[test]
    fn record_validation() {
        assert!(Record::new("", "t", Region::Lazio, 41.9, 12.5).is_err());
        assert!(Record::new("1", "t", Region::Lazio, 91.0, 12.5).is_err());
        assert!(Record::new("1", "t", Region::Lazio, 41.9, f64::NAN).is_err());
        let r = Record::new("1", "t", Region::Lazio, 51.0, 0.0).unwrap();
        assert!(!r.in_italy_bbox());
    }

    #[test]
    fn serializer_rejects_unrepresentable_text() {
        let r = Record::new("1", "riga\nuno", Region::Lazio, 41.9, 12.5).unwrap();
        let mut buf = Vec::new();
        match serialize_tsv(std::slice::from_ref(&r), &mut buf) {
            Err(IngestError::UnrepresentableText { id }) => assert_eq!(id, "1"),
            other => panic!("unexpected: {other:?}"),
        }
    }
}
