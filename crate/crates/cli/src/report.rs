use serde::Serialize;
use serde_json::{Map, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Flagged,
    Error,
}

/// One library call; scalars point at it by index.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Operation {
    pub operation: String,
    pub params: Map<String, Json>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Scalar {
    pub name: String,
    pub value: f64,
    pub unit: &'static str,
    /// Index into `Report::operations`.
    pub op: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub seed: u64,
    pub tol: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub task: String,
    pub op: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub inputs: Map<String, Json>,
    pub operations: Vec<Operation>,
    pub results: Vec<Scalar>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifacts: Vec<String>,
    pub meta: Meta,
}

impl Report {
    pub fn new(task: &str, op: &str, inputs: Map<String, Json>, meta: Meta) -> Report {
        Report {
            task: task.to_string(),
            op: op.to_string(),
            status: Status::Ok,
            message: None,
            inputs,
            operations: Vec::new(),
            results: Vec::new(),
            notes: Vec::new(),
            artifacts: Vec::new(),
            meta,
        }
    }

    /// Records a library invocation and returns its index for [`Report::scalar`].
    pub fn operation(&mut self, name: &str, params: Json) -> usize {
        let params = match params {
            Json::Object(m) => m,
            Json::Null => Map::new(),
            other => Map::from_iter([("value".to_string(), other)]),
        };
        self.operations.push(Operation { operation: name.to_string(), params });
        self.operations.len() - 1
    }

    pub fn scalar(&mut self, op: usize, name: impl Into<String>, value: f64, unit: &'static str) {
        self.results.push(Scalar { name: name.into(), value, unit, op });
    }

    /// Flags the report unless `ok`; errors are never downgraded.
    pub fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok && self.status == Status::Ok {
            self.status = Status::Flagged;
            self.message = Some(message());
        } else if !ok {
            self.notes.push(message());
        }
    }

    pub fn fail(&mut self, message: impl Into<String>) {
        self.status = Status::Error;
        self.message = Some(message.into());
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.results.iter().find(|s| s.name == name).map(|s| s.value)
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serializes_with_provenance() {
        let meta = Meta { seed: 1, tol: 1e-6, timestamp: None };
        let mut r = Report::new("a", "surface report", Map::new(), meta);
        let op = r.operation("curvature_report", serde_json::json!({"u": 0.5, "v": 1.0}));
        r.scalar(op, "K", 0.25, "1/length^2");
        let line = r.to_line();
        assert!(line.contains(r#""status":"ok""#));
        assert!(line.contains(r#""op":0"#));
        assert!(!line.contains("timestamp"));
        r.check(false, || "too big".into());
        assert_eq!(r.status, Status::Flagged);
    }
}
