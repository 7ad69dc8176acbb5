#pragma once

#include <optional>

#include "wsn/crypto.hpp"
#include "wsn/transport.hpp"
#include "wsn/wire.hpp"

namespace wsn {

// Binds one actor's rank to the transport and the run-wide cipher: every
// outgoing payload is encoded, CTR-transformed and wrapped in an envelope;
// every incoming envelope is decrypted in place. Decoding (and its protocol
// errors) stays with the caller.
class SecureChannel {
 public:
  SecureChannel(Rank self, Transport& transport, const CipherConfig& cipher,
                const SchedulingMode& sched, std::size_t packsize)
      : self_(self),
        transport_(transport),
        cipher_(cipher),
        sched_(sched),
        packsize_(packsize) {}

  struct Sent {
    Frame plaintext;
    Frame ciphertext;
    double encrypt_seconds = 0.0;
  };

  struct Received {
    Rank sender = 0;
    Frame plaintext;
    double decrypt_seconds = 0.0;
  };

  Sent send(Rank dest, const Payload& payload) {
    Sent record;
    record.plaintext = encode(payload, packsize_);
    record.ciphertext = record.plaintext;
    record.encrypt_seconds = xcrypt(record.ciphertext, cipher_, sched_);
    transport_.send(Envelope{self_, dest, record.ciphertext});
    return record;
  }

  std::optional<Received> recv() { return open(transport_.recv(self_)); }

  std::optional<Received> try_recv() { return open(transport_.try_recv(self_)); }

  Rank self() const { return self_; }

 private:
  std::optional<Received> open(std::optional<Envelope> env) {
    if (!env) return std::nullopt;
    Received record;
    record.sender = env->sender;
    record.plaintext = std::move(env->ciphertext);
    record.decrypt_seconds = xcrypt(record.plaintext, cipher_, sched_);
    return record;
  }

  Rank self_;
  Transport& transport_;
  const CipherConfig& cipher_;
  const SchedulingMode& sched_;
  std::size_t packsize_;
};

}  // namespace wsn
