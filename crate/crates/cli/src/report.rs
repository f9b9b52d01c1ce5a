use serde_json::{Map, Value};

/// Text lines and a JSON object describing one command's result.
pub struct Report {
    ok: bool,
    lines: Vec<String>,
    fields: Map<String, Value>,
    /// Printed after the report in text mode, embedded in JSON mode.
    attachment: Option<(String, Value, String)>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), command.into());
        Report {
            ok: true,
            lines: Vec::new(),
            fields,
            attachment: None,
        }
    }

    pub fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.insert(key.into(), value.into());
    }

    pub fn fail(&mut self) {
        self.ok = false;
    }

    pub fn attach(&mut self, key: &str, json: Value, text: String) {
        self.attachment = Some((key.into(), json, text));
    }

    /// Exit status: 0 when the command's answer is positive, 1 otherwise.
    pub fn code(&self) -> u8 {
        if self.ok {
            0
        } else {
            1
        }
    }

    pub fn render(&self, json: bool) -> String {
        if json {
            let mut fields = self.fields.clone();
            fields.insert("ok".into(), self.ok.into());
            if let Some((key, value, _)) = &self.attachment {
                fields.insert(key.clone(), value.clone());
            }
            dsynth_core::io::to_json(&Value::Object(fields))
        } else {
            let mut s: String = self.lines.iter().map(|l| format!("{l}\n")).collect();
            if let Some((_, _, text)) = &self.attachment {
                s.push_str(text);
            }
            s
        }
    }
}
