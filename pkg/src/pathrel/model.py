"""Two-channel recurrent-convolutional relation classifier over SDPs.

One RCNN per path direction: an LSTM channel over the path's words and a
second LSTM channel over its directed dependency relations, a convolution
over every adjacent (word, relation, word) dependency unit, and max
pooling into a per-direction feature vector G.  Each direction feeds a
fine-grained (2K+1)-way softmax head; the concatenated pools feed a
coarse (K+1)-way head.  The training objective sums the three
cross-entropies plus an L2 penalty; decoding mixes the forward
distribution with the direction-swapped backward one.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from . import checkpoint as ckpt
from .autodiff import (
    ParamStore,
    Tensor,
    add,
    concat,
    constant,
    cross_entropy,
    dropout_mask,
    lookup_row,
    matmul,
    max_over,
    mul,
    sigmoid,
    softmax,
    tanh,
)
from .depgraph import SdpPath
from .labels import LabelSchema
from .structreg import SR_LINK, invert_path

logger = logging.getLogger(__name__)

FWD = "fwd"
BWD = "bwd"

LSTM_STANDARD = "standard"
LSTM_PAPER_LITERAL = "paper-literal"

UNK = "<unk>"


class EmptyPath(ValueError):
    pass


@dataclass(frozen=True)
class ModelConfig:
    """Architecture and training knobs.

    Channel hidden sizes are tied to the embedding sizes.  lstm_variant
    selects the cell output: "standard" computes h = o * tanh(s),
    "paper-literal" computes h = tanh(s * o).
    """

    word_dim: int = 200
    rel_dim: int = 50
    conv_dim: int = 200
    alpha: float = 0.5
    l2_lambda: float = 1e-5
    keep_prob: float = 0.5
    lstm_variant: str = LSTM_STANDARD
    share_fine_heads: bool = False
    l2_include_embeddings: bool = False
    init_scale: float = 0.1

    def __post_init__(self):
        if min(self.word_dim, self.rel_dim, self.conv_dim) < 1:
            raise ValueError("all dimensions must be positive")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha {self.alpha} outside [0, 1]")
        if not 0.0 < self.keep_prob <= 1.0:
            raise ValueError(f"keep_prob {self.keep_prob} outside (0, 1]")
        if self.lstm_variant not in (LSTM_STANDARD, LSTM_PAPER_LITERAL):
            raise ValueError(f"unknown lstm_variant {self.lstm_variant!r}")

    @property
    def word_hidden(self) -> int:
        return self.word_dim

    @property
    def rel_hidden(self) -> int:
        return self.rel_dim

    def to_dict(self) -> dict:
        return {
            "word_dim": self.word_dim,
            "rel_dim": self.rel_dim,
            "conv_dim": self.conv_dim,
            "alpha": self.alpha,
            "l2_lambda": self.l2_lambda,
            "keep_prob": self.keep_prob,
            "lstm_variant": self.lstm_variant,
            "share_fine_heads": self.share_fine_heads,
            "l2_include_embeddings": self.l2_include_embeddings,
            "init_scale": self.init_scale,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ModelConfig":
        return cls(**doc)


class Vocabulary:
    """Word forms to embedding rows; row 0 is the trained UNK."""

    def __init__(self, words):
        self.words = [UNK] + sorted(set(words) - {UNK})
        self._index = {w: i for i, w in enumerate(self.words)}

    def __len__(self):
        return len(self.words)

    def index(self, form: str) -> int:
        return self._index.get(form, 0)

    def to_list(self) -> list[str]:
        return self.words[1:]


class RelationVocabulary:
    """Directed dependency relations to embedding rows.

    A relation and its reverse get distinct rows (2i for UP, 2i+1 for
    DOWN); the synthetic SR-LINK label is a first-class relation.  The
    final row is the shared UNK for relations unseen in training.
    """

    def __init__(self, deprels):
        self.deprels = sorted(set(deprels) | {SR_LINK})
        self._index = {d: i for i, d in enumerate(self.deprels)}

    @property
    def table_size(self) -> int:
        return 2 * len(self.deprels) + 1

    def row(self, deprel: str, direction: str) -> int:
        i = self._index.get(deprel)
        if i is None:
            return self.table_size - 1
        return 2 * i + (0 if direction == "UP" else 1)

    def to_list(self) -> list[str]:
        return self.deprels


class LstmCell:
    """The eight weight matrices and four biases of one LSTM cell."""

    GATES = ("g", "i", "f", "o")

    def __init__(
        self, store: ParamStore, prefix: str, input_dim: int, hidden_dim: int, rng, init_scale: float
    ):
        self.hidden_dim = hidden_dim
        for gate in self.GATES:
            setattr(
                self,
                f"w_{gate}x",
                _init(store, f"{prefix}/w_{gate}x", (hidden_dim, input_dim), rng, init_scale),
            )
            setattr(
                self,
                f"w_{gate}h",
                _init(store, f"{prefix}/w_{gate}h", (hidden_dim, hidden_dim), rng, init_scale),
            )
            setattr(self, f"b_{gate}", _init(store, f"{prefix}/b_{gate}", (hidden_dim,), None))


def _init(store: ParamStore, name: str, shape, rng, init_scale: float = 0.1) -> Tensor:
    if rng is None:
        return store.add(name, np.zeros(shape))
    return store.add(name, rng.uniform(-init_scale, init_scale, size=shape))


def lstm_step(cell: LstmCell, x: Tensor, h_prev: Tensor, s_prev: Tensor, variant: str = LSTM_STANDARD):
    """One LSTM cell step; returns (h_t, s_t)."""
    g = tanh(add(add(matmul(cell.w_gx, x), matmul(cell.w_gh, h_prev)), cell.b_g))
    i = sigmoid(add(add(matmul(cell.w_ix, x), matmul(cell.w_ih, h_prev)), cell.b_i))
    f = sigmoid(add(add(matmul(cell.w_fx, x), matmul(cell.w_fh, h_prev)), cell.b_f))
    o = sigmoid(add(add(matmul(cell.w_ox, x), matmul(cell.w_oh, h_prev)), cell.b_o))
    s = add(mul(g, i), mul(s_prev, f))
    if variant == LSTM_STANDARD:
        h = mul(o, tanh(s))
    else:
        h = tanh(mul(s, o))
    return h, s


def conv_pool(word_states, rel_states, w_con: Tensor, b_con: Tensor, rel_hidden: int) -> Tensor:
    """tanh convolution over dependency units followed by elementwise max.

    A single-node path (both entity heads identical) pools one pseudo-unit
    built from the word state with a zero relation slot.
    """
    units = []
    if len(word_states) == 1:
        logger.debug("single-node path: pooling a pseudo-unit with zero relation state")
        h = word_states[0]
        pseudo = concat([h, constant(np.zeros(rel_hidden)), h])
        units.append(tanh(add(matmul(w_con, pseudo), b_con)))
    else:
        for i, rel_state in enumerate(rel_states):
            unit = concat([word_states[i], rel_state, word_states[i + 1]])
            units.append(tanh(add(matmul(w_con, unit), b_con)))
    return max_over(units)


@dataclass
class Prediction:
    """The three classifier distributions, plus the decode mixture."""

    y_fwd: np.ndarray
    y_bwd: np.ndarray
    y_coarse: np.ndarray
    y_test: np.ndarray | None = None


def decode(pred: Prediction, alpha: float, schema: LabelSchema) -> str:
    """Mix alpha * y_fwd + (1-alpha) * direction-swapped y_bwd and argmax.

    Ties break toward the lowest class index.  Fills pred.y_test.
    """
    pred.y_test = alpha * pred.y_fwd + (1.0 - alpha) * schema.flip_distribution(pred.y_bwd)
    return schema.fine_label(int(np.argmax(pred.y_test)))


def load_word_embeddings(path) -> dict[str, np.ndarray]:
    """Text embeddings, one `word v1 v2 ... vd` line per word."""
    table = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            parts = line.rstrip("\n").split(" ")
            if len(parts) < 2:
                raise ValueError(f"{path}:{line_no}: expected `word v1 ... vd`")
            table[parts[0]] = np.asarray([float(v) for v in parts[1:]], dtype=np.float64)
    return table


class RelationModel:
    """Parameters plus forward/loss/decode for one schema and vocabulary."""

    def __init__(
        self,
        config: ModelConfig,
        schema: LabelSchema,
        word_vocab: Vocabulary,
        rel_vocab: RelationVocabulary,
        seed: int = 0,
        pretrained: dict[str, np.ndarray] | None = None,
    ):
        self.config = config
        self.schema = schema
        self.word_vocab = word_vocab
        self.rel_vocab = rel_vocab
        self.store = ParamStore()

        rng = np.random.default_rng(seed)
        s = config.init_scale
        emb_word = rng.uniform(-s, s, size=(len(word_vocab), config.word_dim))
        if pretrained:
            for w, vec in pretrained.items():
                if w in word_vocab._index and w != UNK:
                    if vec.shape != (config.word_dim,):
                        raise ValueError(
                            f"embedding for {w!r} has dim {vec.shape}, expected ({config.word_dim},)"
                        )
                    emb_word[word_vocab.index(w)] = vec
        self.emb_word = self.store.add("emb/word", emb_word)
        self.emb_rel = self.store.add(
            "emb/rel", rng.uniform(-s, s, size=(rel_vocab.table_size, config.rel_dim))
        )

        self.cells = {}
        self.conv = {}
        for direction in (FWD, BWD):
            self.cells[(direction, "word")] = LstmCell(
                self.store, f"{direction}/word_cell", config.word_dim, config.word_hidden, rng, s
            )
            self.cells[(direction, "rel")] = LstmCell(
                self.store, f"{direction}/rel_cell", config.rel_dim, config.rel_hidden, rng, s
            )
            unit_dim = 2 * config.word_hidden + config.rel_hidden
            self.conv[direction] = (
                _init(self.store, f"{direction}/conv/w", (config.conv_dim, unit_dim), rng, s),
                _init(self.store, f"{direction}/conv/b", (config.conv_dim,), None),
            )

        fine = schema.fine_size
        self.fine_heads = {}
        self.fine_heads[FWD] = (
            _init(self.store, "fine_fwd/w", (fine, config.conv_dim), rng, s),
            _init(self.store, "fine_fwd/b", (fine,), None),
        )
        if config.share_fine_heads:
            self.fine_heads[BWD] = self.fine_heads[FWD]
        else:
            self.fine_heads[BWD] = (
                _init(self.store, "fine_bwd/w", (fine, config.conv_dim), rng, s),
                _init(self.store, "fine_bwd/b", (fine,), None),
            )
        coarse = schema.coarse_size
        self.coarse_head = (
            _init(self.store, "coarse/w_fwd", (coarse, config.conv_dim), rng, s),
            _init(self.store, "coarse/w_bwd", (coarse, config.conv_dim), rng, s),
            _init(self.store, "coarse/b", (coarse,), None),
        )

    # -- forward pieces -------------------------------------------------

    def encode_path(self, path: SdpPath, direction: str, dropout_rng=None):
        """LSTM states for the words and relations of one path direction.

        The backward direction consumes the inverted path, whose flipped
        edge directions select the reverse-relation embedding rows.  With
        a dropout rng the embedding lookups are masked (training mode).
        """
        if len(path.nodes) == 0:
            raise EmptyPath("cannot encode an empty path")
        if len(path.forms) != len(path.nodes):
            raise ValueError("path carries no surface forms; extract it from a tree first")
        p = path if direction == FWD else invert_path(path)
        cfg = self.config

        def maybe_drop(x, dim):
            if dropout_rng is not None and cfg.keep_prob < 1.0:
                return mul(x, constant(dropout_mask((dim,), cfg.keep_prob, dropout_rng)))
            return x

        word_cell = self.cells[(direction, "word")]
        h = constant(np.zeros(cfg.word_hidden))
        s = constant(np.zeros(cfg.word_hidden))
        word_states = []
        for form in p.forms:
            x = maybe_drop(lookup_row(self.emb_word, self.word_vocab.index(form)), cfg.word_dim)
            h, s = lstm_step(word_cell, x, h, s, cfg.lstm_variant)
            word_states.append(h)

        rel_cell = self.cells[(direction, "rel")]
        h = constant(np.zeros(cfg.rel_hidden))
        s = constant(np.zeros(cfg.rel_hidden))
        rel_states = []
        for edge in p.edges:
            x = maybe_drop(
                lookup_row(self.emb_rel, self.rel_vocab.row(edge.deprel, edge.direction)),
                cfg.rel_dim,
            )
            h, s = lstm_step(rel_cell, x, h, s, cfg.lstm_variant)
            rel_states.append(h)
        return word_states, rel_states

    def pooled(self, path: SdpPath, direction: str, dropout_rng=None) -> Tensor:
        word_states, rel_states = self.encode_path(path, direction, dropout_rng)
        w_con, b_con = self.conv[direction]
        return conv_pool(word_states, rel_states, w_con, b_con, self.config.rel_hidden)

    def classify(self, g_fwd: Tensor, g_bwd: Tensor):
        """Fine distributions per direction plus the coarse distribution."""
        wf, bf = self.fine_heads[FWD]
        wb, bb = self.fine_heads[BWD]
        y_fwd = softmax(add(matmul(wf, g_fwd), bf))
        y_bwd = softmax(add(matmul(wb, g_bwd), bb))
        wc_f, wc_b, bc = self.coarse_head
        y_coarse = softmax(add(add(matmul(wc_f, g_fwd), matmul(wc_b, g_bwd)), bc))
        return y_fwd, y_bwd, y_coarse

    def forward(self, path: SdpPath, dropout_rng=None):
        g_fwd = self.pooled(path, FWD, dropout_rng)
        g_bwd = self.pooled(path, BWD, dropout_rng)
        return self.classify(g_fwd, g_bwd)

    def _l2_filter(self, name: str) -> bool:
        if self.config.l2_include_embeddings:
            return True
        return not name.startswith("emb/")

    def loss(self, path: SdpPath, label: str, dropout_rng=None):
        """Joint objective: three cross-entropies plus the L2 penalty.

        The backward fine target is the direction-swapped gold class,
        mirroring the inverted input path.  Returns (loss, Prediction).
        """
        t_fwd = self.schema.fine_index(label)
        t_bwd = self.schema.flip(t_fwd)
        t_coarse = self.schema.coarse_index(label)
        y_fwd, y_bwd, y_coarse = self.forward(path, dropout_rng)
        j = add(
            add(cross_entropy(y_fwd, t_fwd), cross_entropy(y_bwd, t_bwd)),
            cross_entropy(y_coarse, t_coarse),
        )
        if self.config.l2_lambda > 0.0:
            j = add(j, self.store.l2_penalty(self.config.l2_lambda, include=self._l2_filter))
        return j, Prediction(y_fwd.data.copy(), y_bwd.data.copy(), y_coarse.data.copy())

    # -- inference -------------------------------------------------------

    def predict(self, path: SdpPath, alpha: float | None = None):
        """Eval-mode decode; returns (label, Prediction with y_test)."""
        y_fwd, y_bwd, y_coarse = self.forward(path, dropout_rng=None)
        pred = Prediction(y_fwd.data, y_bwd.data, y_coarse.data)
        label = decode(pred, self.config.alpha if alpha is None else alpha, self.schema)
        return label, pred

    # -- persistence -------------------------------------------------------

    def save(self, path, extra_meta: dict | None = None) -> None:
        meta = {
            "config": self.config.to_dict(),
            "schema": self.schema.to_dict(),
            "words": self.word_vocab.to_list(),
            "deprels": self.rel_vocab.to_list(),
        }
        if extra_meta:
            meta.update(extra_meta)
        ckpt.save_checkpoint(path, {name: t.data for name, t in self.store.items()}, meta)

    @classmethod
    def load(cls, path) -> "RelationModel":
        tensors, meta = ckpt.load_checkpoint(path)
        model = cls(
            config=ModelConfig.from_dict(meta["config"]),
            schema=LabelSchema.from_dict(meta["schema"]),
            word_vocab=Vocabulary(meta["words"]),
            rel_vocab=RelationVocabulary(meta["deprels"]),
            seed=0,
        )
        expected = set(model.store.names())
        got = set(tensors)
        if expected != got:
            missing = expected - got
            extra = got - expected
            raise ckpt.CheckpointError(f"parameter names differ (missing {missing}, extra {extra})")
        for name, arr in tensors.items():
            t = model.store[name]
            if t.data.shape != arr.shape:
                raise ckpt.CheckpointError(
                    f"tensor {name!r}: shape {arr.shape} != expected {t.data.shape}"
                )
            t.data[...] = arr
        return model
