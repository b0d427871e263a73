#!/usr/bin/env python3
"""Writes the shipped layouts under data/layouts/.

office_a is drawn by hand below; office_b mirrors it east-west and drops the
breakroom/lab side door; lab_c is its transpose with a few fixtures moved.
"""
import json
import pathlib
import sys

W, H = 32, 18

ROOMS = [
    ("breakroom", (0, 0, 12, 9)),
    ("quantum_lab", (12, 0, 10, 9)),
    ("robotics_lab", (22, 0, 10, 9)),
    ("hallway", (0, 9, 32, 3)),
    ("main_office", (0, 12, 16, 6)),
    ("reception", (16, 12, 16, 6)),
]

DOORS = [((5, 8), (5, 9)), ((20, 8), (20, 9)), ((26, 8), (26, 9)),
         ((6, 11), (6, 12)), ((24, 11), (24, 12))]
SIDE_DOOR = ((11, 4), (12, 4))

VIEWPOINTS = [
    ("breakroom_vp1", (4, 3), "breakroom"),
    ("breakroom_vp2", (8, 3), "breakroom"),
    ("quantum_lab_vp1", (17, 3), "quantum_lab"),
    ("quantum_lab_vp2", (16, 5), "quantum_lab"),
    ("robotics_lab_vp1", (26, 3), "robotics_lab"),
    ("robotics_lab_vp2", (29, 3), "robotics_lab"),
    ("robotics_lab_vp3", (24, 5), "robotics_lab"),
    ("hallway_vp1", (8, 10), "hallway"),
    ("hallway_vp2", (24, 10), "hallway"),
    ("main_office_vp1", (3, 16), "main_office"),
    ("main_office_vp2", (12, 15), "main_office"),
    ("reception_vp1", (22, 15), "reception"),
    ("reception_vp2", (27, 15), "reception"),
]

FURNISHINGS = [
    ("counter_top_1", "counter_top", (2, 1)),
    ("microwave_1", "microwave", (3, 1)),
    ("coffee_maker_1", "coffee_maker", (4, 1)),
    ("sink_1", "sink", (5, 1)),
    ("fridge_1", "fridge", (8, 1)),
    ("table_1", "table", (6, 5)),
    ("time_machine_1", "time_machine", (14, 3)),
    ("color_changer_1", "color_changer", (17, 1)),
    ("button_red_1", "button_red", (16, 1)),
    ("button_green_1", "button_green", (18, 1)),
    ("button_blue_1", "button_blue", (19, 2)),
    ("laser_cannon_1", "laser_cannon", (14, 7)),
    ("red_monitor_1", "red_monitor", (16, 7)),
    ("laser_shelf_1", "laser_shelf", (18, 7)),
    ("printer_3d_1", "printer_3d", (24, 1)),
    ("computer_1", "computer", (26, 1)),
    ("freeze_ray_1", "freeze_ray", (28, 1)),
    ("freeze_ray_shelf_1", "freeze_ray_shelf", (29, 1)),
    ("blue_monitor_1", "blue_monitor", (30, 4)),
    ("fuse_box_1", "fuse_box", (23, 7)),
    ("light_switch_1", "light_switch", (24, 7)),
    ("desk_1", "desk", (3, 14)),
    ("desk_2", "desk", (10, 14)),
    ("cabinet_1", "cabinet", (1, 16)),
    ("shelf_1", "shelf", (13, 13)),
    ("trash_can_1", "trash_can", (14, 16)),
    ("table_2", "table", (20, 14)),
    ("shelf_2", "shelf", (27, 13)),
    ("plant_1", "plant", (1, 13)),
    ("painting_1", "painting", (30, 16)),
    ("whiteboard_1", "whiteboard", (23, 1)),
]

NOTES = [
    ((3, 5), "The microwave sits on the counter next to the coffee maker."),
    ((19, 4), "Press a button to recolor whatever is on the color changer."),
    ((28, 5), "If the lights stay dark, reset the fuse box first."),
    ((14, 14), "Two desks share this office."),
]


def grid_for(rooms, doors, width, height):
    g = [["#"] * width for _ in range(height)]
    for _, (x, y, w, h) in rooms:
        for yy in range(y + 1, y + h - 1):
            for xx in range(x + 1, x + w - 1):
                g[yy][xx] = "."
    for a, b in doors:
        for (xx, yy) in (a, b):
            g[yy][xx] = "."
    return ["".join(r) for r in g]


def build(layout_id, rooms, doors, vps, furn, notes, width, height):
    return {
        "layout_version": 1,
        "id": layout_id,
        "grid": grid_for(rooms, doors, width, height),
        "rooms": [{"name": n, "rect": list(r)} for n, r in rooms],
        "doorways": [[list(a), list(b)] for a, b in doors],
        "viewpoints": [{"name": n, "cell": list(c), "room": r} for n, c, r in vps],
        "furnishings": [{"id": i, "class": k, "cell": list(c)} for i, k, c in furn],
        "sticky_notes": [{"cell": list(c), "text": t} for c, t in notes],
    }


def mirror(c):
    return (W - 1 - c[0], c[1])


def mirror_rect(r):
    x, y, w, h = r
    return (W - x - w, y, w, h)


def transpose(c):
    return (c[1], c[0])


def transpose_rect(r):
    x, y, w, h = r
    return (y, x, h, w)


def main(out_dir):
    out = pathlib.Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    layouts = [build("office_a", ROOMS, DOORS + [SIDE_DOOR], VIEWPOINTS, FURNISHINGS, NOTES, W, H)]

    layouts.append(build(
        "office_b",
        [(n, mirror_rect(r)) for n, r in ROOMS],
        [(mirror(a), mirror(b)) for a, b in DOORS],
        [(n, mirror(c), r) for n, c, r in VIEWPOINTS],
        [(i, k, mirror(c)) for i, k, c in FURNISHINGS],
        [(mirror(c), t) for c, t in NOTES[1:]] + [(mirror((3, 5)), "Coffee needs water and beans.")],
        W, H))

    moved = {"plant_1": (2, 15), "painting_1": (29, 16)}
    layouts.append(build(
        "lab_c",
        [(n, transpose_rect(r)) for n, r in ROOMS],
        [(transpose(a), transpose(b)) for a, b in DOORS + [SIDE_DOOR]],
        [(n, transpose(c), r) for n, c, r in VIEWPOINTS],
        [(i, k, transpose(moved.get(i, c))) for i, k, c in FURNISHINGS],
        [(transpose(c), t) for c, t in NOTES],
        H, W))

    for doc in layouts:
        (out / f"{doc['id']}.json").write_text(json.dumps(doc, indent=2) + "\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else pathlib.Path(__file__).resolve().parent.parent / "data" / "layouts")
