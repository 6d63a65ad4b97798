//! Starts the HTTP service on a free local port and posts a model to
//! `/v1/analyze` over a plain TCP connection.
//!
//! ```text
//! cargo run --example remote_service -- fixtures/safety_fixed.ciot
//! ```

use std::io::{Read, Write};
use std::net::TcpStream;

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "fixtures/safety_fixed.ciot".into());
    let body = serde_json::json!({ "model_text": std::fs::read_to_string(&path)? }).to_string();

    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await?;
    let addr = listener.local_addr()?;
    tokio::spawn(async move { axum::serve(listener, iotforge::service::router()).await });

    let response = tokio::task::spawn_blocking(move || -> std::io::Result<String> {
        let mut stream = TcpStream::connect(addr)?;
        write!(
            stream,
            "POST /v1/analyze HTTP/1.1\r\nHost: {addr}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{body}",
            body.len()
        )?;
        let mut text = String::new();
        stream.read_to_string(&mut text)?;
        Ok(text)
    })
    .await??;

    let (head, json) = response.split_once("\r\n\r\n").unwrap_or((&response, ""));
    println!("{}", head.lines().next().unwrap_or_default());
    print!("{json}");
    Ok(())
}
