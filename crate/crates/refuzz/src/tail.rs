//! Bounded capture of the last N bytes of a stream.

/// Keeps the most recent `cap` bytes pushed into it. Used for
/// stdout/stderr/pty capture so a chatty target can never exhaust harness
/// memory.
#[derive(Debug)]
pub(crate) struct TailBuffer {
    cap: usize,
    buf: Vec<u8>,
}

impl TailBuffer {
    pub fn new(cap: usize) -> Self {
        Self {
            cap,
            buf: Vec::new(),
        }
    }

    pub fn push(&mut self, data: &[u8]) {
        if data.len() >= self.cap {
            self.buf.clear();
            self.buf.extend_from_slice(&data[data.len() - self.cap..]);
            return;
        }
        self.buf.extend_from_slice(data);
        if self.buf.len() > self.cap {
            let excess = self.buf.len() - self.cap;
            self.buf.drain(..excess);
        }
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keeps_last_bytes() {
        let mut tail = TailBuffer::new(4);
        tail.push(b"abc");
        tail.push(b"defg");
        assert_eq!(tail.into_bytes(), b"defg");
    }

    #[test]
    fn oversized_push() {
        let mut tail = TailBuffer::new(3);
        tail.push(b"0123456789");
        assert_eq!(tail.into_bytes(), b"789");
    }

    #[test]
    fn under_capacity() {
        let mut tail = TailBuffer::new(100);
        tail.push(b"hi");
        assert_eq!(tail.into_bytes(), b"hi");
    }
}
