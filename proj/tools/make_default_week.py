#!/usr/bin/env python3
"""Writes data/default_week.json: one meeting room, five 2 h meetings."""
import json
import math
import pathlib

DAY = 86400
HOUR = 3600

profiles = [
    {"person": "ann", "preferred": 21.0},
    {"person": "bo", "preferred": 22.5},
    {"person": "cy", "preferred": 20.5},
    {"person": "di", "preferred": 23.0},
]

# (day, attendees with show-up probability, who badges in and when)
plan = [
    ("mon", 0, {"ann": 1.0, "bo": 0.9, "cy": 0.9, "di": 0.8}, {"ann": 0, "bo": 0, "cy": 0, "di": 0}),
    ("tue", 1, {"ann": 0.9, "bo": 0.8, "cy": 0.7}, {"ann": 0, "bo": 0}),
    ("wed", 2, {"ann": 1.0, "di": 0.9}, {"ann": 0, "di": 0}),
    ("thu", 3, {"bo": 0.6, "cy": 0.5}, {}),
    ("fri", 4, {"ann": 0.9, "bo": 0.9, "cy": 0.8, "di": 0.9}, {"ann": 0, "bo": 0, "cy": 0, "di": 900}),
]

calendar, badges = [], []
for name, day, attendees, arrivals in plan:
    start = day * DAY + 13 * HOUR
    calendar.append({
        "meeting": name,
        "room": "meet",
        "start": start,
        "duration": 2 * HOUR,
        "attendees": [{"person": p, "p": q} for p, q in attendees.items()],
    })
    for person, delay in arrivals.items():
        badges.append({"time": start + delay, "person": person, "room": "meet", "kind": "enter"})
        badges.append({"time": start + 2 * HOUR, "person": person, "room": "meet", "kind": "leave"})
badges.sort(key=lambda b: (b["time"], b["kind"] != "leave", b["person"]))

weather = [[h * HOUR, round(10.0 + 2.5 * math.sin(2 * math.pi * (h - 9) / 24), 4)] for h in range(7 * 24 + 1)]

scenario = {
    "rooms": [{
        "id": "meet",
        "resistance": 0.01,
        "capacitance": 2.0e6,
        "initial_temp": 16.0,
        "radiator_power": 1000.0,
        "vent_conductance": 50.0,
    }],
    "profiles": profiles,
    "calendar": calendar,
    "badges": badges,
    "overrides": [{"time": 2 * DAY + 16 * HOUR, "room": "meet", "power": 0.0, "expiry": 2 * DAY + 17 * HOUR}],
    "weather": weather,
    "seed": 7,
    "horizon": 7 * DAY,
}

out = pathlib.Path(__file__).resolve().parent.parent / "data" / "default_week.json"
out.write_text(json.dumps(scenario, indent=1) + "\n")
