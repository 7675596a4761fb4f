"""Walk through the token encoding and the MIDI round trip.

A piece is a bag of quantized notes; the codec turns it into a flat token
sequence of (VELOCITY, DURATION, PITCH) triples punctuated by timestep
markers, and back. The same piece also survives a trip through a real
Standard MIDI File.
"""

from storycomposer import codec, smf
from storycomposer.pieces import Note, Piece
from storycomposer.vocab import id_token

piece = Piece(
    notes=(
        Note(start=0, pitch=60, velocity=80, duration=2),
        Note(start=2, pitch=64, velocity=70, duration=4),
    )
)

tokens = codec.encode(piece)
print("token ids: ", tokens)
print("token names:", " ".join(str(id_token(t)) for t in tokens))

back = codec.decode(tokens, piece.timestep_rate)
print("decode(encode(piece)) == piece:", back == piece)

midi_bytes = smf.write_midi(piece)
print(f"\nwrote {len(midi_bytes)} bytes of MIDI (header {midi_bytes[:4]!r})")
parsed = smf.parse_midi(midi_bytes, piece.timestep_rate)
print("parse_midi(write_midi(piece)) == piece:", parsed == piece)

print("\nexcerpt length:", codec.duration_seconds(tokens, piece.timestep_rate), "seconds")
