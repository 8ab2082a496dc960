//! HTTP adapter for an external extraction service.
//!
//! One POST per extraction request, JSON in both directions. Transport
//! failures and 5xx responses are retried up to the endpoint's retry
//! budget; 4xx responses are not (the request will not get better).
//! Whatever comes back is parsed strictly — unknown fields, wrong response
//! shape, or non-JSON bodies are schema violations, reported fail-closed
//! and never repaired. The caller's schema gate then vets the content.

use serde::Deserialize;

use super::{
    ExtractionRequest, ExtractionResponse, ExternalEndpoint, LiteralJson, Target, TargetError,
    TargetErrorKind,
};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EntityResponseJson {
    constants: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationResponseJson {
    literals: Vec<LiteralJson>,
}

fn unavailable(target: &str, detail: impl ToString) -> TargetError {
    TargetError {
        target: target.to_string(),
        kind: TargetErrorKind::Unavailable(detail.to_string()),
    }
}

fn violation(target: &str, detail: impl ToString) -> TargetError {
    TargetError {
        target: target.to_string(),
        kind: TargetErrorKind::SchemaViolation(detail.to_string()),
    }
}

fn parse_response(
    body: &str,
    target: &Target,
    label: &str,
) -> Result<ExtractionResponse, TargetError> {
    match target {
        Target::Entity { .. } => serde_json::from_str::<EntityResponseJson>(body)
            .map(|r| ExtractionResponse::Entities {
                constants: r.constants,
            })
            .map_err(|e| violation(label, format!("malformed entity response: {}", e))),
        Target::Relation { .. } => serde_json::from_str::<RelationResponseJson>(body)
            .map(|r| ExtractionResponse::Literals {
                literals: r.literals,
            })
            .map_err(|e| violation(label, format!("malformed relation response: {}", e))),
    }
}

/// Sends one extraction request and returns the strictly-parsed response.
pub(crate) fn post(
    endpoint: &ExternalEndpoint,
    request: &ExtractionRequest,
    label: &str,
) -> Result<ExtractionResponse, TargetError> {
    let client = reqwest::blocking::Client::builder()
        .timeout(endpoint.timeout)
        .build()
        .map_err(|e| unavailable(label, e))?;
    let body = request.to_canonical_json();

    let mut last_error = String::from("no attempt made");
    for _ in 0..=endpoint.retries {
        let mut builder = client
            .post(&endpoint.url)
            .header(reqwest::header::CONTENT_TYPE, "application/json")
            .body(body.clone());
        if let Some(token) = &endpoint.bearer {
            builder = builder.bearer_auth(token);
        }
        match builder.send() {
            Ok(response) => {
                let status = response.status();
                if status.is_success() {
                    let text = response.text().map_err(|e| unavailable(label, e))?;
                    return parse_response(&text, &request.target, label);
                }
                last_error = format!("HTTP {}", status.as_u16());
                if !status.is_server_error() {
                    break;
                }
            }
            Err(e) => last_error = e.to_string(),
        }
    }
    Err(unavailable(label, last_error))
}

#[cfg(test)]
mod tests {
    use std::io::{Read, Write};
    use std::net::{TcpListener, TcpStream};
    use std::sync::mpsc;
    use std::thread;
    use std::time::Duration;

    use super::*;
    use crate::fol::{Constant, PredicateSymbol};
    use crate::ingest::{extract_entities, extract_relations, ExtractorBinding};

    fn read_http_request(stream: &mut TcpStream) -> String {
        let mut buf = Vec::new();
        let mut chunk = [0u8; 1024];
        let header_end = loop {
            let n = stream.read(&mut chunk).unwrap();
            buf.extend_from_slice(&chunk[..n]);
            if let Some(pos) = buf.windows(4).position(|w| w == b"\r\n\r\n") {
                break pos + 4;
            }
            if n == 0 {
                return String::from_utf8_lossy(&buf).into_owned();
            }
        };
        let headers = String::from_utf8_lossy(&buf[..header_end]).into_owned();
        let content_length = headers
            .lines()
            .find_map(|l| {
                let (k, v) = l.split_once(':')?;
                k.eq_ignore_ascii_case("content-length")
                    .then(|| v.trim().parse::<usize>().ok())?
            })
            .unwrap_or(0);
        while buf.len() < header_end + content_length {
            let n = stream.read(&mut chunk).unwrap();
            if n == 0 {
                break;
            }
            buf.extend_from_slice(&chunk[..n]);
        }
        String::from_utf8_lossy(&buf).into_owned()
    }

    /// Serves the scripted responses to sequential connections, recording
    /// each raw request.
    fn mock_server(responses: Vec<(u16, String)>) -> (String, mpsc::Receiver<String>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}", listener.local_addr().unwrap());
        let (tx, rx) = mpsc::channel();
        thread::spawn(move || {
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let request = read_http_request(&mut stream);
                let _ = tx.send(request);
                let response = format!(
                    "HTTP/1.1 {} MOCK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{}",
                    status,
                    body.len(),
                    body
                );
                let _ = stream.write_all(response.as_bytes());
            }
        });
        (url, rx)
    }

    fn endpoint(url: String, retries: u32) -> ExternalEndpoint {
        ExternalEndpoint {
            url,
            bearer: Some("sekrit".into()),
            timeout: Duration::from_secs(5),
            retries,
        }
    }

    #[test]
    fn entity_round_trip_with_bearer_header() {
        let (url, rx) = mock_server(vec![(200, r#"{"constants":["ALICE","BOB"]}"#.into())]);
        let binding = ExtractorBinding::External(endpoint(url, 0));
        let constants = extract_entities("Alice is the sister of Bob.", "Person", &binding).unwrap();
        assert_eq!(
            constants,
            vec![
                Constant {
                    name: "ALICE".into(),
                    sort: "Person".into()
                },
                Constant {
                    name: "BOB".into(),
                    sort: "Person".into()
                },
            ]
        );
        let request = rx.recv().unwrap();
        assert!(request.contains("Authorization: Bearer sekrit") || request.contains("authorization: Bearer sekrit"));
        assert!(request.contains(r#""kind":"entity""#));
        assert!(request.contains(r#""sort":"Person""#));
        assert!(request.contains("response_schema"));
    }

    #[test]
    fn relation_round_trip_applies_schema_gate() {
        let pred = PredicateSymbol::condition("is_sick", vec!["Person".into()], "acute illness");
        let constants = vec![Constant {
            name: "ALICE".into(),
            sort: "Person".into(),
        }];

        let (url, _rx) = mock_server(vec![(
            200,
            r#"{"literals":[{"predicate":"is_sick","args":["ALICE"],"negated":false}]}"#.into(),
        )]);
        let binding = ExtractorBinding::External(endpoint(url, 0));
        let lits = extract_relations("Alice fell ill", &pred, &constants, &binding).unwrap();
        assert_eq!(lits.len(), 1);
        assert_eq!(lits[0].to_string(), "is_sick(ALICE)");

        // Hostile payload smuggling a different predicate: rejected wholesale.
        let (url, _rx) = mock_server(vec![(
            200,
            r#"{"literals":[{"predicate":"is_covered","args":["ALICE"],"negated":false}]}"#.into(),
        )]);
        let binding = ExtractorBinding::External(endpoint(url, 0));
        let err = extract_relations("whatever", &pred, &constants, &binding).unwrap_err();
        assert!(matches!(err.kind, TargetErrorKind::SchemaViolation(_)));
    }

    #[test]
    fn unknown_fields_are_a_schema_violation() {
        let (url, _rx) = mock_server(vec![(
            200,
            r#"{"constants":["ALICE"],"note":"trust me"}"#.into(),
        )]);
        let binding = ExtractorBinding::External(endpoint(url, 0));
        let err = extract_entities("text", "Person", &binding).unwrap_err();
        assert!(matches!(err.kind, TargetErrorKind::SchemaViolation(_)));
    }

    #[test]
    fn wrong_response_shape_is_a_schema_violation() {
        let (url, _rx) = mock_server(vec![(200, r#"{"literals":[]}"#.into())]);
        let binding = ExtractorBinding::External(endpoint(url, 0));
        let err = extract_entities("text", "Person", &binding).unwrap_err();
        assert!(matches!(err.kind, TargetErrorKind::SchemaViolation(_)));
    }

    #[test]
    fn server_errors_are_retried() {
        let (url, rx) = mock_server(vec![
            (500, String::new()),
            (200, r#"{"constants":["ALICE"]}"#.into()),
        ]);
        let binding = ExtractorBinding::External(endpoint(url, 1));
        let constants = extract_entities("text", "Person", &binding).unwrap();
        assert_eq!(constants.len(), 1);
        assert_eq!(rx.iter().count(), 2);
    }

    #[test]
    fn client_errors_are_not_retried() {
        let (url, rx) = mock_server(vec![(404, String::new())]);
        let binding = ExtractorBinding::External(endpoint(url, 5));
        let err = extract_entities("text", "Person", &binding).unwrap_err();
        match &err.kind {
            TargetErrorKind::Unavailable(detail) => assert!(detail.contains("404")),
            other => panic!("expected Unavailable, got {:?}", other),
        }
        assert_eq!(rx.iter().count(), 1);
    }

    #[test]
    fn unreachable_endpoint_is_unavailable() {
        let url = {
            let listener = TcpListener::bind("127.0.0.1:0").unwrap();
            format!("http://{}", listener.local_addr().unwrap())
        };
        let binding = ExtractorBinding::External(ExternalEndpoint {
            url,
            bearer: None,
            timeout: Duration::from_millis(500),
            retries: 1,
        });
        let err = extract_entities("text", "Person", &binding).unwrap_err();
        assert!(matches!(err.kind, TargetErrorKind::Unavailable(_)));
    }
}
