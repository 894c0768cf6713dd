//! Serves the toy stub distribution over the line-delimited JSON protocol on a
//! local port and queries it the way the neural scorer does.

use std::net::TcpListener;
use std::path::Path;
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use amr_relink::neural::{serve, Endpoint, NeuralBackend, NeuralRequest, StubNeural, TcpNeuralClient};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/toy");
    let stub = StubNeural::load(&dir.join("neural_stub.json"))?;

    let listener = TcpListener::bind("127.0.0.1:0")?;
    let addr = listener.local_addr()?;
    thread::spawn(move || serve(listener, Arc::new(stub)));

    let client = TcpNeuralClient::new(&addr.to_string(), Duration::from_secs(2));
    let question = "Who is starring in Spanish movies produced by Benicio del Toro?";
    let span = |surface: &str| {
        let start = question.find(surface).expect("surface occurs in the question");
        Endpoint::Span {
            start,
            end: start + surface.len(),
        }
    };
    let requests = [
        NeuralRequest {
            question: question.into(),
            subj: span("movies"),
            obj: span("Benicio del Toro"),
        },
        NeuralRequest {
            question: question.into(),
            subj: Endpoint::Surface {
                surface: "movies".into(),
            },
            obj: Endpoint::Surface {
                surface: "amr-unknown".into(),
            },
        },
    ];
    for req in &requests {
        println!("{}", serde_json::to_string(req)?);
        for (relation, p) in client.distribution(req)? {
            println!("  {relation:<16} {p:.2}");
        }
    }
    Ok(())
}
