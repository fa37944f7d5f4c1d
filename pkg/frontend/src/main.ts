import { AdvisorClient } from "./api.js";
import { loadSession } from "./state.js";
import { App } from "./ui.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("advisor") ?? "http://127.0.0.1:8421";

const root = document.getElementById("app");
if (root === null) throw new Error("missing #app mount point");

new App(root, new AdvisorClient(baseUrl), window.localStorage, loadSession(window.localStorage));
