"""Regenerates the ONNX fixtures and golden outputs under tests/data.

Needs numpy, onnx and onnxruntime. The outputs are committed, so the C++
tests never run Python. Usage: python3 make_fixtures.py [out_dir]
"""

import sys
from pathlib import Path

import numpy as np
import onnx
import onnxruntime as ort
from onnx import TensorProto, helper, numpy_helper

OPSET = 13
rng = np.random.default_rng(20240517)


def const(name, arr):
    return numpy_helper.from_array(np.asarray(arr, dtype=np.float32), name)


def model(nodes, inits, in_shape, out_shape, name, metadata=None, in_name="input", out_name="output"):
    graph = helper.make_graph(
        nodes,
        name,
        [helper.make_tensor_value_info(in_name, TensorProto.FLOAT, in_shape)],
        [helper.make_tensor_value_info(out_name, TensorProto.FLOAT, out_shape)],
        initializer=inits,
    )
    m = helper.make_model(graph, opset_imports=[helper.make_opsetid("", OPSET)], producer_name="make_fixtures")
    m.ir_version = 8
    for k, v in (metadata or {}).items():
        entry = m.metadata_props.add()
        entry.key, entry.value = k, v
    onnx.checker.check_model(m)
    return m


def run(m, x):
    sess = ort.InferenceSession(m.SerializeToString(), providers=["CPUExecutionProvider"])
    return sess.run(None, {sess.get_inputs()[0].name: x})[0]


def conv_bn(prefix, cin, cout, k, stride, pad, inits, nodes, src, relu=True):
    w = rng.normal(0, np.sqrt(2.0 / (cin * k * k)), (cout, cin, k, k))
    inits += [
        const(prefix + "_w", w),
        const(prefix + "_scale", rng.uniform(0.5, 1.5, cout)),
        const(prefix + "_shift", rng.normal(0, 0.1, cout)),
        const(prefix + "_mean", rng.normal(0, 0.1, cout)),
        const(prefix + "_var", rng.uniform(0.5, 1.5, cout)),
    ]
    nodes.append(helper.make_node("Conv", [src, prefix + "_w"], [prefix + "_c"], kernel_shape=[k, k],
                                  strides=[stride, stride], pads=[pad] * 4))
    nodes.append(helper.make_node("BatchNormalization",
                                  [prefix + "_c", prefix + "_scale", prefix + "_shift", prefix + "_mean", prefix + "_var"],
                                  [prefix + "_bn"], epsilon=1e-5))
    if not relu:
        return prefix + "_bn"
    nodes.append(helper.make_node("Relu", [prefix + "_bn"], [prefix + "_r"]))
    return prefix + "_r"


MEAN = np.array([0.485, 0.456, 0.406], dtype=np.float32)
STD = np.array([0.229, 0.224, 0.225], dtype=np.float32)


def backbone(fold_normalization=True, head=False, batch=1):
    """Stem conv, max pool, one basic residual block, 1x1 widening to 2048, GAP."""
    nodes, inits = [], []
    src = "input"
    if fold_normalization:
        inits += [const("norm_mean", MEAN.reshape(1, 3, 1, 1)), const("norm_std", STD.reshape(1, 3, 1, 1))]
        nodes += [helper.make_node("Sub", ["input", "norm_mean"], ["centered"]),
                  helper.make_node("Div", ["centered", "norm_std"], ["normalized"])]
        src = "normalized"
    stem = conv_bn("stem", 3, 8, 7, 2, 3, inits, nodes, src)
    nodes.append(helper.make_node("MaxPool", [stem], ["pool"], kernel_shape=[3, 3], strides=[2, 2], pads=[1, 1, 1, 1]))
    a = conv_bn("block_a", 8, 8, 3, 1, 1, inits, nodes, "pool")
    b = conv_bn("block_b", 8, 8, 3, 1, 1, inits, nodes, a, relu=False)
    nodes += [helper.make_node("Add", [b, "pool"], ["res"]), helper.make_node("Relu", ["res"], ["res_r"])]
    inits += [const("widen_w", rng.normal(0, 0.3, (2048, 8, 1, 1))), const("widen_b", rng.normal(0, 0.05, 2048))]
    nodes += [helper.make_node("Conv", ["res_r", "widen_w", "widen_b"], ["wide"], kernel_shape=[1, 1]),
              helper.make_node("Relu", ["wide"], ["wide_r"]),
              helper.make_node("GlobalAveragePool", ["wide_r"], ["gap"]),
              helper.make_node("Flatten", ["gap"], ["descriptor" if not head else "flat"], axis=1)]
    out_name, out_len = "descriptor", 2048
    if head:
        inits += [const("fc_w", rng.normal(0, 0.02, (10, 2048))), const("fc_b", np.zeros(10))]
        nodes.append(helper.make_node("Gemm", ["flat", "fc_w", "fc_b"], ["logits"], transB=1))
        out_name, out_len = "logits", 10
    metadata = None
    if not fold_normalization:
        metadata = {"cervix.input_mean": ",".join(f"{v:.3f}" for v in MEAN),
                    "cervix.input_std": ",".join(f"{v:.3f}" for v in STD)}
    return model(nodes, inits, [batch, 3, 224, 224], [batch, out_len], "tiny_backbone", metadata, out_name=out_name)


def pattern_image():
    """Same formula as the C++ tests: (3x + 5y + 70c) mod 256."""
    y, x, c = np.meshgrid(np.arange(224), np.arange(224), np.arange(3), indexing="ij")
    return ((3 * x + 5 * y + 70 * c) % 256).astype(np.uint8)


def to_input(img, normalize):
    x = img.astype(np.float32) / np.float32(255.0)
    if normalize:
        x = (x - MEAN) / STD
    return np.ascontiguousarray(x.transpose(2, 0, 1)[None].astype(np.float32))


def op_graphs():
    out = {}
    # Max pool with ceil_mode and asymmetric padding.
    out["ops_maxpool_ceil"] = (model([helper.make_node("MaxPool", ["input"], ["output"], kernel_shape=[3, 3], strides=[2, 2],
                                                       pads=[1, 0, 0, 1], ceil_mode=1)],
                                     [], [1, 2, 7, 9], [None] * 4, "maxpool"), (1, 2, 7, 9))
    for include in (0, 1):
        out[f"ops_avgpool_pad{include}"] = (
            model([helper.make_node("AveragePool", ["input"], ["output"], kernel_shape=[3, 2], strides=[2, 1],
                                    pads=[1, 1, 1, 0], count_include_pad=include)], [], [2, 3, 6, 5], [None] * 4, "avgpool"),
            (2, 3, 6, 5))
    # Grouped, strided, dilated convolution with asymmetric padding and bias.
    out["ops_conv_group"] = (
        model([helper.make_node("Conv", ["input", "w", "b"], ["output"], group=2, strides=[2, 1], dilations=[2, 1],
                                pads=[2, 1, 1, 0], kernel_shape=[3, 3])],
              [const("w", rng.normal(0, 1, (6, 2, 3, 3))), const("b", rng.normal(0, 1, 6))], [1, 4, 9, 8], [None] * 4,
              "conv"),
        (1, 4, 9, 8))
    # SAME_UPPER padding with an even kernel and stride 2.
    out["ops_conv_same"] = (
        model([helper.make_node("Conv", ["input", "w"], ["output"], strides=[2, 2], auto_pad="SAME_UPPER",
                                kernel_shape=[2, 4])],
              [const("w", rng.normal(0, 1, (3, 2, 2, 4)))], [2, 2, 7, 6], [None] * 4, "conv_same"),
        (2, 2, 7, 6))
    # Flatten, Gemm with transposes and scaling, Reshape, MatMul, broadcasting arithmetic, Identity, Constant.
    shape = numpy_helper.from_array(np.array([3, 4], dtype=np.int64), "shape")
    nodes = [
        helper.make_node("Flatten", ["input"], ["flat"], axis=1),
        helper.make_node("Gemm", ["flat", "gw", "gb"], ["g"], transB=1, alpha=0.5, beta=2.0),
        helper.make_node("Reshape", ["g", "shape"], ["r"]),
        helper.make_node("MatMul", ["r", "mm"], ["m"]),
        helper.make_node("Constant", [], ["k"], value=const("kval", rng.normal(0, 1, (1, 5)))),
        helper.make_node("Mul", ["m", "k"], ["mk"]),
        helper.make_node("Sub", ["mk", "col"], ["s"]),
        helper.make_node("Div", ["s", "den"], ["dv"]),
        helper.make_node("Identity", ["dv"], ["output"]),
    ]
    inits = [const("gw", rng.normal(0, 1, (12, 10))), const("gb", rng.normal(0, 1, 12)), shape,
             const("mm", rng.normal(0, 1, (4, 5))), const("col", rng.normal(0, 1, (3, 1))),
             const("den", rng.uniform(0.5, 2.0, (5,)))]
    out["ops_dense"] = (model(nodes, inits, [1, 2, 5], [None] * 2, "dense"), (1, 2, 5))
    bn_inits = [const(n, v) for n, v in (("s", rng.uniform(0.5, 1.5, 3)), ("t", rng.normal(0, 1, 3)),
                                         ("mu", rng.normal(0, 1, 3)), ("var", rng.uniform(0.5, 1.5, 3)))]
    out["ops_batchnorm"] = (model([helper.make_node("BatchNormalization", ["input", "s", "t", "mu", "var"], ["output"],
                                                    epsilon=1e-3)], bn_inits, [2, 3, 4, 4], [None] * 4, "bn"), (2, 3, 4, 4))
    return out


def write_f32(path, arr):
    np.ascontiguousarray(arr, dtype="<f4").tofile(path)


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data"
    out.mkdir(parents=True, exist_ok=True)

    folded = backbone(fold_normalization=True)
    meta = backbone(fold_normalization=False)
    head = backbone(fold_normalization=True, head=True, batch="N")
    for name, m in (("tiny_backbone", folded), ("tiny_backbone_meta", meta), ("tiny_head", head)):
        onnx.save(m, out / f"{name}.onnx")

    for img_name, img in (("zero", np.zeros((224, 224, 3), np.uint8)), ("pattern", pattern_image())):
        write_f32(out / f"tiny_backbone_{img_name}.f32", run(folded, to_input(img, False)).reshape(-1))
        write_f32(out / f"tiny_backbone_meta_{img_name}.f32", run(meta, to_input(img, True)).reshape(-1))

    for name, (m, shape) in op_graphs().items():
        x = rng.normal(0, 1, shape).astype(np.float32)
        onnx.save(m, out / f"{name}.onnx")
        write_f32(out / f"{name}_input.f32", x.reshape(-1))
        y = run(m, x)
        write_f32(out / f"{name}_output.f32", y.reshape(-1))
        (out / f"{name}_output.shape").write_text(" ".join(str(v) for v in y.shape) + "\n")


if __name__ == "__main__":
    main()
