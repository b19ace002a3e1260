//! Report rendering. Text output is the flattened JSON body, so the two
//! formats carry the same fields.

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
    Csv,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}` (text, json or csv)")),
        }
    }
}

pub struct Report {
    pub body: Value,
    /// Table for `--format csv`.
    pub csv: Option<String>,
    /// Replaces the flattened body in text mode.
    pub text: Option<String>,
}

impl Report {
    pub fn new(body: Value) -> Self {
        Report {
            body,
            csv: None,
            text: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }

    pub fn render(&self, format: Format) -> Result<String, String> {
        match format {
            Format::Json => Ok(serde_json::to_string_pretty(&self.body).expect("report serializes") + "\n"),
            Format::Text => Ok(self.text.clone().unwrap_or_else(|| flatten_text(&self.body))),
            Format::Csv => self.csv.clone().ok_or_else(|| "this report has no CSV form".to_string()),
        }
    }
}

/// `path: value` lines; table rows are left to the CSV form.
pub fn flatten_text(v: &Value) -> String {
    let mut out = Vec::new();
    walk("", v, &mut out);
    out.into_iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}

fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                if k == "rows" {
                    continue;
                }
                walk(&key(k), x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            out.push((prefix.to_string(), format!("[{}]", items.join(", "))));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                walk(&key(&i.to_string()), x, out);
            }
        }
        _ => out.push((prefix.to_string(), scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening() {
        let v = json!({"a": {"b": 1, "c": "x"}, "rows": [1, 2], "l": [1, 2], "o": [{"k": true}]});
        assert_eq!(flatten_text(&v), "a.b: 1\na.c: x\nl: [1, 2]\no.0.k: true\n");
    }
}
