"""Mesh and tree-fabric topology construction and bisection queries."""

import pytest

from wafersim.errors import ConfigError, ConstraintViolation
from wafersim.fabric import (
    IoAttachment,
    L1GroupSpec,
    NodeKind,
    TreeFabricSpec,
    bisection_bandwidth,
    border_io_attachments,
    build_mesh,
    build_tree_fabric,
)

TB = 1e12
GB = 1e9


def standard_groups(io_split=(4, 4, 4, 3, 3)):
    return tuple(
        L1GroupSpec(npus=tuple(range(4 * g, 4 * g + 4)), io_channels=io_split[g])
        for g in range(5)
    )


def test_baseline_mesh_has_18_io_and_3_75_tbps_bisection():
    att = border_io_attachments(4, 5)
    assert len(att) == 18
    topo = build_mesh(4, 5, 750 * GB, att, io_bw=128 * GB)
    assert topo.npu_count() == 20
    ios = [n for n in topo.nodes.values() if n.kind is NodeKind.IO_CONTROLLER]
    assert len(ios) == 18
    assert bisection_bandwidth(topo) == pytest.approx(3.75 * TB)


def test_corner_npus_carry_two_io_controllers():
    topo = build_mesh(4, 5, 750 * GB, border_io_attachments(4, 5))
    corner_links = [
        l for l in topo.links.values() if l.src.startswith("io") and l.dst == "npu0"
    ]
    assert len(corner_links) == 2


def test_mesh_directed_link_count():
    for rows, cols in [(1, 1), (1, 2), (4, 4), (4, 5), (3, 6)]:
        topo = build_mesh(rows, cols, GB)
        expected = 2 * (rows * (cols - 1) + cols * (rows - 1))
        npu_links = [
            l
            for l in topo.links.values()
            if l.src.startswith("npu") and l.dst.startswith("npu")
        ]
        assert len(npu_links) == expected


def test_single_npu_mesh_has_no_links():
    topo = build_mesh(1, 1, GB)
    assert topo.npu_count() == 1
    assert not topo.links
    with pytest.raises(ConstraintViolation):
        bisection_bandwidth(topo)


def test_1x2_mesh_bisection_is_link_bw():
    topo = build_mesh(1, 2, GB)
    assert bisection_bandwidth(topo) == pytest.approx(GB)


def test_4x4_mesh_for_hotspot_analysis():
    att = border_io_attachments(4, 4)
    assert len(att) == 16
    topo = build_mesh(4, 4, 750 * GB, att)
    assert topo.npu_count() == 16


def test_interior_io_attachment_rejected():
    with pytest.raises(ConstraintViolation):
        build_mesh(4, 5, 750 * GB, [IoAttachment(npu=6, edge="n")])


def test_xy_route_goes_x_first():
    topo = build_mesh(4, 5, 750 * GB)
    mesh = topo.structure
    path = mesh.xy_path(mesh.index(0, 4), mesh.index(1, 0))
    assert path[0].startswith("npu4->npu3")
    assert len(path) == 5
    assert all(lid in topo.links for lid in path)


def test_fred_cd_fabric_bisection_30_tbps():
    spec = TreeFabricSpec(
        groups=standard_groups(),
        npu_link_bw=3 * TB,
        io_link_bw=128 * GB,
        l1_l2_bw=12 * TB,
    )
    topo = build_tree_fabric(spec)
    assert topo.npu_count() == 20
    assert len([n for n in topo.nodes.values() if n.kind is NodeKind.IO_CONTROLLER]) == 18
    assert bisection_bandwidth(topo) == pytest.approx(30 * TB)
    fabric = topo.structure
    # L1 port counts: 4 NPU + 4 uplink slots + 4 or 3 I/O.
    assert [sw.ports for sw in fabric.l1_switches] == [12, 12, 12, 11, 11]
    assert fabric.l2_switch.ports == 20


def test_fred_ab_fabric_downscaled_uplinks():
    spec = TreeFabricSpec(
        groups=standard_groups(),
        npu_link_bw=3 * TB,
        io_link_bw=128 * GB,
        l1_l2_bw=1.5 * TB,
    )
    assert bisection_bandwidth(build_tree_fabric(spec)) == pytest.approx(3.75 * TB)


def test_single_level_fabric():
    spec = TreeFabricSpec(
        groups=(L1GroupSpec(npus=tuple(range(8))),),
        npu_link_bw=3 * TB,
        io_link_bw=128 * GB,
        l1_l2_bw=None,
    )
    topo = build_tree_fabric(spec)
    fabric = topo.structure
    assert fabric.levels == 1
    assert fabric.l2_switch is None
    assert fabric.l1_switches[0].ports == 8
    assert bisection_bandwidth(topo) == pytest.approx(12 * TB)


def test_fabric_rejects_duplicate_and_orphan_groups():
    with pytest.raises(ConfigError):
        build_tree_fabric(
            TreeFabricSpec(
                groups=(L1GroupSpec(npus=(0, 1)), L1GroupSpec(npus=(1, 2))),
                npu_link_bw=TB,
                io_link_bw=GB,
                l1_l2_bw=TB,
            )
        )
    with pytest.raises(ConfigError):
        build_tree_fabric(
            TreeFabricSpec(
                groups=(L1GroupSpec(npus=(0, 1)), L1GroupSpec(npus=())),
                npu_link_bw=TB,
                io_link_bw=GB,
                l1_l2_bw=TB,
            )
        )
    with pytest.raises(ConfigError):
        build_tree_fabric(
            TreeFabricSpec(
                groups=(L1GroupSpec(npus=(0,)), L1GroupSpec(npus=(1,))),
                npu_link_bw=TB,
                io_link_bw=GB,
                l1_l2_bw=None,
            )
        )


def test_describe_rows_cover_nodes_and_links():
    topo = build_mesh(2, 2, GB, border_io_attachments(2, 2))
    rows = topo.describe_rows()
    kinds = {r[0] for r in rows[1:]}
    assert kinds == {"node", "link"}
    assert len([r for r in rows if r[0] == "node"]) == 4 + 8
