//! Score texts through the HTTP client against a toy scorer on localhost.

use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpListener;

use pinned_auc::io::{score_remote, RemoteScorerConfig};

/// Answers `{"texts": [...]}` with a score per text: the share of letters
/// that are uppercase.
fn toy_server() -> std::io::Result<String> {
    let listener = TcpListener::bind("127.0.0.1:0")?;
    let url = format!("http://{}/score", listener.local_addr()?);
    std::thread::spawn(move || {
        for mut stream in listener.incoming().flatten() {
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut length = 0;
            let mut line = String::new();
            while reader.read_line(&mut line).unwrap() > 2 {
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    length = v.trim().parse().unwrap();
                }
                line.clear();
            }
            let mut body = vec![0; length];
            reader.read_exact(&mut body).unwrap();
            let request: serde_json::Value = serde_json::from_slice(&body).unwrap();
            let scores: Vec<f64> = request["texts"]
                .as_array()
                .unwrap()
                .iter()
                .map(|t| {
                    let t = t.as_str().unwrap();
                    let letters = t.chars().filter(|c| c.is_alphabetic()).count().max(1);
                    t.chars().filter(|c| c.is_uppercase()).count() as f64 / letters as f64
                })
                .collect();
            let reply = serde_json::json!({ "scores": scores }).to_string();
            let _ = write!(
                stream,
                "HTTP/1.1 200 OK\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{reply}",
                reply.len()
            );
        }
    });
    Ok(url)
}

fn main() -> pinned_auc::Result<()> {
    let config = RemoteScorerConfig {
        batch_size: 2,
        ..RemoteScorerConfig::new(toy_server()?)
    };
    let texts = ["hello there", "YOU ARE AWFUL", "Mixed Case", "ok"];
    for (text, score) in texts.iter().zip(score_remote(&texts, &config)?) {
        match score {
            Ok(s) => println!("{s:.3}  {text}"),
            Err(e) => println!("error  {text}: {e}"),
        }
    }
    Ok(())
}
