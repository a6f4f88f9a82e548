import { App } from "./app.js";
import { Client } from "./api.js";
import { mount } from "./ui.js";

const root = document.getElementById("app");
if (root) {
  mount(new App(new Client("")), root);
}
