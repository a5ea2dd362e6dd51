//! Nominal survey tables.
//!
//! A [`DataTable`] stores one byte per cell: the index of the cell's category
//! in its variable's category list, or [`MISSING`]. Category codes are
//! assigned in order of first appearance in the input, so ingestion never
//! depends on how labels sort.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

/// Reserved cell code for a missing value.
pub const MISSING: u8 = u8::MAX;

/// Largest number of categories a variable may have (codes `0..=254`).
pub const MAX_CATEGORIES: usize = 255;

/// Label of the category that absorbs empty fields under [`MissingPolicy::AsCategory`].
pub const MISSING_LABEL: &str = "NA";

/// What to do with empty attribute fields at ingest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MissingPolicy {
    /// Recode empty fields (and literal `NA`) into a dedicated `NA` category.
    #[default]
    AsCategory,
    /// Drop every row with an empty attribute field.
    DropRow,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NominalVariable {
    name: String,
    categories: Vec<String>,
    missing_category: Option<u8>,
}

impl NominalVariable {
    pub fn new(name: impl Into<String>, categories: Vec<String>) -> Result<Self> {
        Self::build(name.into(), categories, None)
    }

    /// A variable whose category at `missing` stands for missing answers.
    pub fn with_missing_category(
        name: impl Into<String>,
        categories: Vec<String>,
        missing: u8,
    ) -> Result<Self> {
        Self::build(name.into(), categories, Some(missing))
    }

    fn build(name: String, categories: Vec<String>, missing_category: Option<u8>) -> Result<Self> {
        if categories.is_empty() {
            return Err(Error::InvalidSchema(format!(
                "variable `{name}` has no categories"
            )));
        }
        if categories.len() > MAX_CATEGORIES {
            return Err(Error::TooManyCategories(name));
        }
        let mut seen = HashMap::with_capacity(categories.len());
        for c in &categories {
            if seen.insert(c.as_str(), ()).is_some() {
                return Err(Error::InvalidSchema(format!(
                    "variable `{name}` repeats category `{c}`"
                )));
            }
        }
        if let Some(m) = missing_category {
            if m as usize >= categories.len() {
                return Err(Error::InvalidSchema(format!(
                    "variable `{name}`: missing category {m} out of range"
                )));
            }
        }
        Ok(NominalVariable {
            name,
            categories,
            missing_category,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn n_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn includes_missing_category(&self) -> bool {
        self.missing_category.is_some()
    }

    pub fn missing_category(&self) -> Option<u8> {
        self.missing_category
    }

    pub fn code_of(&self, label: &str) -> Option<u8> {
        self.categories
            .iter()
            .position(|c| c == label)
            .map(|i| i as u8)
    }

    /// Label for `code`; `None` for [`MISSING`] or out-of-range codes.
    pub fn label(&self, code: u8) -> Option<&str> {
        self.categories.get(code as usize).map(String::as_str)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    variables: Vec<NominalVariable>,
    target_index: usize,
}

impl Schema {
    pub fn new(variables: Vec<NominalVariable>, target_index: usize) -> Result<Self> {
        let mut names = HashMap::with_capacity(variables.len());
        for v in &variables {
            if names.insert(v.name(), ()).is_some() {
                return Err(Error::DuplicateColumn(v.name().to_string()));
            }
        }
        let target = variables.get(target_index).ok_or_else(|| {
            Error::InvalidSchema(format!("target index {target_index} out of range"))
        })?;
        if target.n_categories() < 2 {
            return Err(Error::InvalidSchema(format!(
                "class variable `{}` needs at least 2 categories, has {}",
                target.name(),
                target.n_categories()
            )));
        }
        Ok(Schema {
            variables,
            target_index,
        })
    }

    pub fn variables(&self) -> &[NominalVariable] {
        &self.variables
    }

    pub fn variable(&self, index: usize) -> &NominalVariable {
        &self.variables[index]
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn target(&self) -> &NominalVariable {
        &self.variables[self.target_index]
    }

    pub fn n_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn n_attributes(&self) -> usize {
        self.variables.len() - 1
    }

    /// Column indices of all non-class variables, ascending.
    pub fn attribute_indices(&self) -> Vec<usize> {
        (0..self.variables.len())
            .filter(|&i| i != self.target_index)
            .collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name() == name)
    }
}

/// Column-oriented nominal table. Immutable after construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DataTable {
    schema: Schema,
    columns: Vec<Vec<u8>>,
    n_rows: usize,
}

impl DataTable {
    pub fn new(schema: Schema, columns: Vec<Vec<u8>>) -> Result<Self> {
        if columns.len() != schema.n_variables() {
            return Err(Error::InvalidTable(format!(
                "{} columns for {} variables",
                columns.len(),
                schema.n_variables()
            )));
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        for (j, col) in columns.iter().enumerate() {
            let var = schema.variable(j);
            if col.len() != n_rows {
                return Err(Error::InvalidTable(format!(
                    "column `{}` has {} rows, expected {n_rows}",
                    var.name(),
                    col.len()
                )));
            }
            let n_cat = var.n_categories();
            let is_target = j == schema.target_index();
            for (r, &code) in col.iter().enumerate() {
                if code == MISSING {
                    if is_target {
                        return Err(Error::InvalidTable(format!(
                            "class column has a missing value at row {r}"
                        )));
                    }
                } else if code as usize >= n_cat {
                    return Err(Error::InvalidTable(format!(
                        "column `{}` row {r}: code {code} >= {n_cat} categories",
                        var.name()
                    )));
                }
            }
        }
        Ok(DataTable {
            schema,
            columns,
            n_rows,
        })
    }

    /// Builds a table from string records, registering categories in order
    /// of first appearance. Empty fields follow `policy`; rows with an empty
    /// class field are rejected.
    pub fn from_records<H: AsRef<str>, S: AsRef<str>>(
        header: &[H],
        target: &str,
        records: &[Vec<S>],
        policy: MissingPolicy,
    ) -> Result<Self> {
        let header: Vec<String> = header.iter().map(|h| h.as_ref().to_string()).collect();
        let mut builder = TableBuilder::new(header, target, policy)?;
        for (i, rec) in records.iter().enumerate() {
            builder.push(rec.iter().map(AsRef::as_ref), i as u64 + 2)?;
        }
        Ok(builder.finish()?.0)
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn column(&self, index: usize) -> &[u8] {
        &self.columns[index]
    }

    pub fn class_codes(&self) -> &[u8] {
        &self.columns[self.schema.target_index()]
    }

    pub fn n_classes(&self) -> usize {
        self.schema.target().n_categories()
    }

    pub fn attribute_indices(&self) -> Vec<usize> {
        self.schema.attribute_indices()
    }

    pub fn n_attributes(&self) -> usize {
        self.schema.n_attributes()
    }

    /// Attribute columns in ascending column order (class excluded).
    pub fn attribute_columns(&self) -> Vec<&[u8]> {
        self.attribute_indices()
            .into_iter()
            .map(|j| self.column(j))
            .collect()
    }

    /// Checks that `index` names a non-class column.
    pub fn check_attribute(&self, index: usize) -> Result<()> {
        if index >= self.schema.n_variables() {
            return Err(Error::arg(format!(
                "attribute index {index} out of range (table has {} columns)",
                self.schema.n_variables()
            )));
        }
        if index == self.schema.target_index() {
            return Err(Error::arg(format!(
                "attribute index {index} is the class column"
            )));
        }
        Ok(())
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0usize; self.n_classes()];
        for &c in self.class_codes() {
            counts[c as usize] += 1;
        }
        counts
    }

    /// `(label, count)` per class category, in category order.
    pub fn class_distribution(&self) -> Vec<(String, usize)> {
        self.schema
            .target()
            .categories()
            .iter()
            .cloned()
            .zip(self.class_counts())
            .collect()
    }

    /// Keeps the given attributes, in the given order, followed by the class.
    pub fn select_columns(&self, attribute_indices: &[usize]) -> Result<DataTable> {
        let mut seen = vec![false; self.schema.n_variables()];
        for &j in attribute_indices {
            self.check_attribute(j)?;
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::arg(format!("attribute index {j} selected twice")));
            }
        }
        let target = self.schema.target_index();
        let order: Vec<usize> = attribute_indices
            .iter()
            .copied()
            .chain(std::iter::once(target))
            .collect();
        let variables = order
            .iter()
            .map(|&j| self.schema.variable(j).clone())
            .collect();
        let columns = order.iter().map(|&j| self.columns[j].clone()).collect();
        Ok(DataTable {
            schema: Schema::new(variables, attribute_indices.len())?,
            columns,
            n_rows: self.n_rows,
        })
    }

    /// Table with the given rows (repeats allowed), in the given order.
    pub fn take_rows(&self, rows: &[usize]) -> DataTable {
        let columns = self
            .columns
            .iter()
            .map(|col| rows.iter().map(|&r| col[r]).collect())
            .collect();
        DataTable {
            schema: self.schema.clone(),
            columns,
            n_rows: rows.len(),
        }
    }

    /// Writes the attribute codes of `row` (ascending column order) into `buf`.
    pub fn attribute_row(&self, row: usize, buf: &mut Vec<u8>) {
        buf.clear();
        let target = self.schema.target_index();
        buf.extend(
            self.columns
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != target)
                .map(|(_, col)| col[row]),
        );
    }

    /// Cell label, with missing cells and missing-category cells as `""`.
    pub fn cell_label(&self, row: usize, column: usize) -> &str {
        let var = self.schema.variable(column);
        let code = self.columns[column][row];
        if code == MISSING || var.missing_category() == Some(code) {
            ""
        } else {
            var.label(code).unwrap_or("")
        }
    }
}

/// Counts gathered while reading a CSV file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IngestStats {
    /// Data lines read (header and comment lines excluded).
    pub data_lines: usize,
    /// Rows dropped under [`MissingPolicy::DropRow`].
    pub dropped_missing: usize,
    /// Rows rejected because the class field was empty.
    pub rejected_class: usize,
}

struct ColumnBuilder {
    name: String,
    labels: Vec<String>,
    index: HashMap<String, u8>,
    missing_category: Option<u8>,
    codes: Vec<u8>,
}

impl ColumnBuilder {
    fn code(&mut self, label: &str) -> Result<u8> {
        if let Some(&c) = self.index.get(label) {
            return Ok(c);
        }
        if self.labels.len() >= MAX_CATEGORIES {
            return Err(Error::TooManyCategories(self.name.clone()));
        }
        let c = self.labels.len() as u8;
        self.labels.push(label.to_string());
        self.index.insert(label.to_string(), c);
        Ok(c)
    }
}

struct TableBuilder {
    columns: Vec<ColumnBuilder>,
    target: usize,
    policy: MissingPolicy,
    stats: IngestStats,
    row: Vec<u8>,
}

impl TableBuilder {
    fn new(header: Vec<String>, target: &str, policy: MissingPolicy) -> Result<Self> {
        if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
            return Err(Error::MissingHeader);
        }
        let mut names = HashMap::new();
        for h in &header {
            if names.insert(h.as_str(), ()).is_some() {
                return Err(Error::DuplicateColumn(h.clone()));
            }
        }
        let target = header
            .iter()
            .position(|h| h == target)
            .ok_or_else(|| Error::MissingTarget(target.to_string()))?;
        let n = header.len();
        let columns = header
            .into_iter()
            .map(|name| ColumnBuilder {
                name,
                labels: Vec::new(),
                index: HashMap::new(),
                missing_category: None,
                codes: Vec::new(),
            })
            .collect();
        Ok(TableBuilder {
            columns,
            target,
            policy,
            stats: IngestStats::default(),
            row: Vec::with_capacity(n),
        })
    }

    fn push<'a>(&mut self, fields: impl Iterator<Item = &'a str>, line: u64) -> Result<()> {
        let fields: Vec<&str> = fields.collect();
        if fields.len() != self.columns.len() {
            return Err(Error::RaggedRow {
                line,
                expected: self.columns.len(),
                found: fields.len(),
            });
        }
        self.stats.data_lines += 1;
        if fields[self.target].is_empty() {
            self.stats.rejected_class += 1;
            return Ok(());
        }
        if self.policy == MissingPolicy::DropRow
            && fields
                .iter()
                .enumerate()
                .any(|(j, f)| j != self.target && f.is_empty())
        {
            self.stats.dropped_missing += 1;
            return Ok(());
        }
        // Codes are staged so a failing row leaves no partial column state.
        self.row.clear();
        for (j, &f) in fields.iter().enumerate() {
            let col = &mut self.columns[j];
            let code = if j != self.target
                && self.policy == MissingPolicy::AsCategory
                && (f.is_empty() || f == MISSING_LABEL)
            {
                let c = col.code(MISSING_LABEL)?;
                col.missing_category = Some(c);
                c
            } else {
                col.code(f)?
            };
            self.row.push(code);
        }
        for (col, &code) in self.columns.iter_mut().zip(&self.row) {
            col.codes.push(code);
        }
        Ok(())
    }

    fn finish(self) -> Result<(DataTable, IngestStats)> {
        let mut variables = Vec::with_capacity(self.columns.len());
        let mut columns = Vec::with_capacity(self.columns.len());
        for col in self.columns {
            let var = if col.labels.is_empty() {
                // A column with no data rows still needs one category to be a valid variable.
                NominalVariable::new(col.name, vec![MISSING_LABEL.to_string()])?
            } else {
                NominalVariable::build(col.name, col.labels, col.missing_category)?
            };
            variables.push(var);
            columns.push(col.codes);
        }
        let table = DataTable::new(Schema::new(variables, self.target)?, columns)?;
        Ok((table, self.stats))
    }
}

/// Reads a nominal table from CSV text. Lines starting with `#` are comments.
pub fn read_csv_from<R: Read>(
    reader: R,
    target: &str,
    policy: MissingPolicy,
) -> Result<(DataTable, IngestStats)> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut records = rdr.records();
    let header = match records.next() {
        Some(r) => r?,
        None => return Err(Error::MissingHeader),
    };
    let header: Vec<String> = header.iter().map(|h| h.trim().to_string()).collect();
    let mut builder = TableBuilder::new(header, target, policy)?;
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        builder.push(rec.iter(), line)?;
    }
    builder.finish()
}

pub fn read_csv(
    path: impl AsRef<Path>,
    target: &str,
    policy: MissingPolicy,
) -> Result<(DataTable, IngestStats)> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv_from(file, target, policy)
}

/// Writes `table` as CSV: header, then one line per row. Missing cells and
/// cells of a missing category are written as empty fields.
pub fn write_csv_to<W: Write>(table: &DataTable, writer: W) -> Result<()> {
    let mut wtr = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    wtr.write_record(table.schema().variables().iter().map(NominalVariable::name))?;
    let n_cols = table.schema().n_variables();
    for r in 0..table.n_rows() {
        wtr.write_record((0..n_cols).map(|j| table.cell_label(r, j)))?;
    }
    wtr.flush().map_err(|e| Error::io("<csv writer>", e))?;
    Ok(())
}

pub fn write_csv(table: &DataTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    write_csv_to(table, &mut out)?;
    out.flush().map_err(|e| Error::io(path, e))
}
