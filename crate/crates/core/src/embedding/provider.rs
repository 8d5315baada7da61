//! External embedding providers.
//!
//! Protocol: the request is a list of texts, the response a list of float
//! vectors plus the provider's declared dimension. Over HTTP this is
//! `POST <url>` with `{"texts": [...]}` answered by
//! `{"dimension": D, "vectors": [[...], ...]}`.

use std::time::Duration;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{l2_normalize, EmbedError, Embedder};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProviderBatch {
    pub dimension: usize,
    pub vectors: Vec<Vec<f32>>,
}

pub trait EmbeddingProvider: Send + Sync {
    fn embed_batch(&self, texts: &[&str]) -> Result<ProviderBatch, EmbedError>;
}

/// Calls the provider and returns unit vectors in input order, whatever the
/// norm of the provider's output.
pub fn external_embed(
    provider: &dyn EmbeddingProvider,
    texts: &[&str],
    expected_dimension: usize,
) -> Result<Vec<Vec<f32>>, EmbedError> {
    let batch = provider.embed_batch(texts)?;
    if batch.dimension != expected_dimension {
        return Err(EmbedError::DimensionMismatch {
            expected: expected_dimension,
            got: batch.dimension,
        });
    }
    if batch.vectors.len() != texts.len() {
        return Err(EmbedError::BatchSizeMismatch {
            expected: texts.len(),
            got: batch.vectors.len(),
        });
    }
    let mut vectors = batch.vectors;
    for v in &mut vectors {
        if v.len() != expected_dimension {
            return Err(EmbedError::DimensionMismatch {
                expected: expected_dimension,
                got: v.len(),
            });
        }
        l2_normalize(v);
    }
    Ok(vectors)
}

#[derive(Serialize)]
struct EmbedRequest<'a> {
    texts: &'a [&'a str],
}

/// JSON-over-HTTP provider client.
#[derive(Debug, Clone)]
pub struct HttpEmbeddingProvider {
    url: String,
    client: reqwest::blocking::Client,
}

impl HttpEmbeddingProvider {
    pub fn new(url: impl Into<String>) -> Result<Self, EmbedError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(Duration::from_secs(60))
            .build()
            .map_err(|e| EmbedError::ProviderUnavailable(e.to_string()))?;
        Ok(Self {
            url: url.into(),
            client,
        })
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl EmbeddingProvider for HttpEmbeddingProvider {
    fn embed_batch(&self, texts: &[&str]) -> Result<ProviderBatch, EmbedError> {
        let unavailable = |e: reqwest::Error| EmbedError::ProviderUnavailable(e.to_string());
        self.client
            .post(&self.url)
            .json(&EmbedRequest { texts })
            .send()
            .map_err(unavailable)?
            .error_for_status()
            .map_err(unavailable)?
            .json::<ProviderBatch>()
            .map_err(unavailable)
    }
}

/// Adapts a provider to the [`Embedder`] interface, splitting large inputs
/// into batches that are sent concurrently.
pub struct ProviderEmbedder {
    provider: Box<dyn EmbeddingProvider>,
    dimension: usize,
    name: String,
    batch_size: usize,
}

impl ProviderEmbedder {
    pub fn new(provider: Box<dyn EmbeddingProvider>, model: &str, dimension: usize) -> Self {
        Self {
            provider,
            dimension,
            name: format!("provider:{model}:d{dimension}"),
            batch_size: 64,
        }
    }

    pub fn with_batch_size(mut self, batch_size: usize) -> Self {
        self.batch_size = batch_size.max(1);
        self
    }
}

impl Embedder for ProviderEmbedder {
    fn name(&self) -> &str {
        &self.name
    }

    fn dimension(&self) -> usize {
        self.dimension
    }

    fn encode_batch(&self, texts: &[&str]) -> Result<Vec<Vec<f32>>, EmbedError> {
        let parts: Vec<Vec<Vec<f32>>> = texts
            .par_chunks(self.batch_size)
            .map(|chunk| external_embed(self.provider.as_ref(), chunk, self.dimension))
            .collect::<Result<_, _>>()?;
        Ok(parts.into_iter().flatten().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::super::dot;
    use super::*;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;

    struct Fixed {
        dimension: usize,
        scale: f32,
    }

    impl EmbeddingProvider for Fixed {
        fn embed_batch(&self, texts: &[&str]) -> Result<ProviderBatch, EmbedError> {
            Ok(ProviderBatch {
                dimension: self.dimension,
                vectors: texts
                    .iter()
                    .enumerate()
                    .map(|(i, _)| {
                        let mut v = vec![0.0; self.dimension];
                        v[i % self.dimension] = self.scale;
                        v
                    })
                    .collect(),
            })
        }
    }

    #[test]
    fn unit_vectors_pass_through() {
        let p = Fixed {
            dimension: 4,
            scale: 1.0,
        };
        let out = external_embed(&p, &["a", "b"], 4).unwrap();
        assert_eq!(out[0], vec![1.0, 0.0, 0.0, 0.0]);
        assert_eq!(out[1], vec![0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn norm_two_becomes_unit() {
        let p = Fixed {
            dimension: 3,
            scale: 2.0,
        };
        let out = external_embed(&p, &["a"], 3).unwrap();
        assert!((dot(&out[0], &out[0]) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn declared_dimension_must_match() {
        let p = Fixed {
            dimension: 384,
            scale: 1.0,
        };
        assert_eq!(
            external_embed(&p, &["a"], 256),
            Err(EmbedError::DimensionMismatch {
                expected: 256,
                got: 384
            })
        );
    }

    #[test]
    fn batches_preserve_order() {
        let e = ProviderEmbedder::new(
            Box::new(Fixed {
                dimension: 8,
                scale: 3.0,
            }),
            "fixed",
            8,
        )
        .with_batch_size(3);
        let texts: Vec<&str> = vec!["t"; 7];
        let out = e.encode_batch(&texts).unwrap();
        assert_eq!(out.len(), 7);
        // Position restarts per batch of three.
        let hot: Vec<usize> = out
            .iter()
            .map(|v| v.iter().position(|&x| x > 0.0).unwrap())
            .collect();
        assert_eq!(hot, vec![0, 1, 2, 0, 1, 2, 0]);
        assert_eq!(e.name(), "provider:fixed:d8");
    }

    fn serve_once(body: &'static str) -> String {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        std::thread::spawn(move || {
            let (mut stream, _) = listener.accept().unwrap();
            let mut reader = BufReader::new(stream.try_clone().unwrap());
            let mut content_length = 0;
            loop {
                let mut line = String::new();
                reader.read_line(&mut line).unwrap();
                if line == "\r\n" || line.is_empty() {
                    break;
                }
                if let Some(v) = line.to_ascii_lowercase().strip_prefix("content-length:") {
                    content_length = v.trim().parse().unwrap();
                }
            }
            let mut buf = vec![0; content_length];
            reader.read_exact(&mut buf).unwrap();
            let req: serde_json::Value = serde_json::from_slice(&buf).unwrap();
            assert_eq!(req["texts"].as_array().unwrap().len(), 2);
            write!(
                stream,
                "HTTP/1.1 200 OK\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{}",
                body.len(),
                body
            )
            .unwrap();
        });
        format!("http://{addr}/embed")
    }

    #[test]
    fn http_provider_round_trip() {
        let url = serve_once(r#"{"dimension":2,"vectors":[[3.0,4.0],[0.0,2.0]]}"#);
        let provider = HttpEmbeddingProvider::new(url).unwrap();
        let out = external_embed(&provider, &["a", "b"], 2).unwrap();
        assert!((out[0][0] - 0.6).abs() < 1e-6);
        assert!((out[0][1] - 0.8).abs() < 1e-6);
        assert_eq!(out[1], vec![0.0, 1.0]);
    }

    #[test]
    fn http_provider_unreachable() {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let addr = listener.local_addr().unwrap();
        drop(listener);
        let provider = HttpEmbeddingProvider::new(format!("http://{addr}/embed")).unwrap();
        assert!(matches!(
            provider.embed_batch(&["a"]),
            Err(EmbedError::ProviderUnavailable(_))
        ));
    }
}
