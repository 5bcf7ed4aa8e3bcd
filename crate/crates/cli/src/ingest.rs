//! CSV ingestion for the analysis commands.
//!
//! A leading line with no numeric field is treated as a header. The t-test
//! reader then accepts either long format (group,value rows, detected by a
//! "group" header or non-numeric labels) or one column of values per group,
//! ragged once the shorter group runs out. The correlation reader wants
//! exactly two numeric columns of equal length.

use mml::corr::BivariateSample;
use mml::ttest::TwoSampleData;

use crate::Failure;

fn malformed(message: impl Into<String>) -> Failure {
    Failure::usage(message)
}

fn is_numeric(field: &str) -> bool {
    !field.is_empty() && field.parse::<f64>().is_ok()
}

fn parse_field(field: &str, line: usize) -> Result<f64, Failure> {
    field
        .parse::<f64>()
        .map_err(|_| malformed(format!("line {line}: expected a number, got {field:?}")))
}

fn read_records(bytes: &[u8]) -> Result<Vec<Vec<String>>, Failure> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| malformed(format!("unreadable CSV: {e}")))?;
        let row: Vec<String> = record.iter().map(str::to_owned).collect();
        if row.iter().any(|field| !field.is_empty()) {
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Splits off the header, if the first line has no numeric field.
fn split_header(mut rows: Vec<Vec<String>>) -> (Option<Vec<String>>, Vec<Vec<String>>) {
    let is_header = rows
        .first()
        .is_some_and(|row| !row.iter().any(|field| is_numeric(field)));
    let header = is_header.then(|| rows.remove(0));
    (header, rows)
}

pub fn two_groups(bytes: &[u8]) -> Result<TwoSampleData, Failure> {
    let (header, data) = split_header(read_records(bytes)?);
    if data.is_empty() {
        return Err(malformed("no data rows"));
    }
    let long_by_header = header
        .as_ref()
        .is_some_and(|h| h.first().is_some_and(|name| name.eq_ignore_ascii_case("group")));
    let long_by_labels = data.iter().any(|row| !is_numeric(&row[0]));
    let groups = if long_by_header || long_by_labels {
        long_format(&data)?
    } else {
        column_format(&data)?
    };
    if groups.y1.len() < 2 || groups.y2.len() < 2 {
        return Err(malformed("need at least two observations in each group"));
    }
    Ok(groups)
}

fn long_format(data: &[Vec<String>]) -> Result<TwoSampleData, Failure> {
    let mut labels: Vec<&str> = Vec::new();
    let mut groups: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    for (i, row) in data.iter().enumerate() {
        let line = i + 2;
        if row.len() != 2 {
            return Err(malformed(format!("line {line}: long format needs group,value rows")));
        }
        let value = parse_field(&row[1], line)?;
        let idx = match labels.iter().position(|l| *l == row[0]) {
            Some(idx) => idx,
            None => {
                labels.push(&row[0]);
                labels.len() - 1
            }
        };
        if idx > 1 {
            return Err(malformed(format!(
                "line {line}: third group label {:?} (two groups expected)",
                row[0]
            )));
        }
        groups[idx].push(value);
    }
    if labels.len() != 2 {
        return Err(malformed("need exactly two group labels"));
    }
    let [y1, y2] = groups;
    Ok(TwoSampleData { y1, y2 })
}

fn column_format(data: &[Vec<String>]) -> Result<TwoSampleData, Failure> {
    let mut y1 = Vec::new();
    let mut y2 = Vec::new();
    for (i, row) in data.iter().enumerate() {
        let line = i + 1;
        if row.len() > 2 {
            return Err(malformed(format!("line {line}: expected at most two columns")));
        }
        for (field, out) in row.iter().zip([&mut y1, &mut y2]) {
            if !field.is_empty() {
                out.push(parse_field(field, line)?);
            }
        }
    }
    Ok(TwoSampleData { y1, y2 })
}

pub fn pairs(bytes: &[u8]) -> Result<BivariateSample, Failure> {
    let (_, data) = split_header(read_records(bytes)?);
    let mut out = Vec::with_capacity(data.len());
    for (i, row) in data.iter().enumerate() {
        let line = i + 1;
        if row.len() != 2 {
            return Err(malformed(format!("line {line}: expected exactly two columns")));
        }
        out.push((parse_field(&row[0], line)?, parse_field(&row[1], line)?));
    }
    if out.len() < 3 {
        return Err(malformed("need at least three pairs"));
    }
    Ok(BivariateSample { pairs: out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn long_format_with_header() {
        let data = two_groups(b"group,value\na,1.0\nb,2.0\na,3.0\nb,4.0\n").unwrap();
        assert_eq!(data.y1, vec![1.0, 3.0]);
        assert_eq!(data.y2, vec![2.0, 4.0]);
    }

    #[test]
    fn long_format_without_header_by_labels() {
        let data = two_groups(b"x,1.5\ny,2.5\nx,3.5\ny,4.5\n").unwrap();
        assert_eq!(data.y1, vec![1.5, 3.5]);
        assert_eq!(data.y2, vec![2.5, 4.5]);
    }

    #[test]
    fn numeric_group_labels_need_the_group_header() {
        let data = two_groups(b"group,value\n1,1.5\n2,2.5\n1,3.5\n2,4.5\n").unwrap();
        assert_eq!(data.y1, vec![1.5, 3.5]);
        assert_eq!(data.y2, vec![2.5, 4.5]);
    }

    #[test]
    fn column_format_accepts_ragged_groups() {
        let data = two_groups(b"y1,y2\n1.0,4.0\n2.0,5.0\n3.0\n").unwrap();
        assert_eq!(data.y1, vec![1.0, 2.0, 3.0]);
        assert_eq!(data.y2, vec![4.0, 5.0]);
    }

    #[test]
    fn rejects_bad_group_shapes() {
        assert!(two_groups(b"").is_err());
        assert!(two_groups(b"1.0,2.0\n").is_err());
        assert!(two_groups(b"a,1\nb,2\nc,3\na,4\nb,5\n").is_err());
        assert!(two_groups(b"1.0,2.0,3.0\n4.0,5.0,6.0\n").is_err());
        assert!(two_groups(b"y1,y2\n1.0,oops\n2.0,3.0\n4.0,5.0\n").is_err());
    }

    #[test]
    fn pairs_want_two_equal_columns() {
        let sample = pairs(b"y1,y2\n1.0,2.0\n3.0,4.0\n5.0,6.0\n").unwrap();
        assert_eq!(sample.pairs.len(), 3);
        assert!(pairs(b"1.0,2.0\n3.0,4.0\n").is_err());
        assert!(pairs(b"1.0,2.0\n3.0\n5.0,6.0\n").is_err());
        assert!(pairs(b"1.0,2.0\n3.0,x\n5.0,6.0\n").is_err());
    }

    #[test]
    fn blank_lines_are_skipped() {
        let data = two_groups(b"1.0,4.0\n\n2.0,5.0\n").unwrap();
        assert_eq!(data.y1.len(), 2);
    }
}
