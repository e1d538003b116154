import { StudioApi } from "./api.js";
import { Studio } from "./studio.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:8765";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

const studio = new Studio(root, new StudioApi(base));
studio.track(studio.start());
