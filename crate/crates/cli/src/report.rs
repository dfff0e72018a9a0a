//! Deterministic JSON rendering for command reports: keys stay in
//! insertion order and every float is printed with 17 significant digits,
//! so identical seeds give byte-identical output.

pub fn fmt_f64(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        // keep integers readable
        format!("{:.1}", x)
    } else {
        format!("{:.16e}", x)
    }
}

pub enum JsonValue {
    Null,
    Bool(bool),
    Num(f64),
    Str(String),
    Array(Vec<JsonValue>),
    Object(Vec<(String, JsonValue)>),
}

impl JsonValue {
    pub fn render(&self) -> String {
        match self {
            JsonValue::Null => "null".into(),
            JsonValue::Bool(b) => b.to_string(),
            JsonValue::Num(x) => fmt_f64(*x),
            JsonValue::Str(s) => format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\"")),
            JsonValue::Array(items) => {
                let inner: Vec<String> = items.iter().map(|v| v.render()).collect();
                format!("[{}]", inner.join(","))
            }
            JsonValue::Object(fields) => {
                let inner: Vec<String> = fields
                    .iter()
                    .map(|(k, v)| format!("\"{}\":{}", k, v.render()))
                    .collect();
                format!("{{{}}}", inner.join(","))
            }
        }
    }
}
