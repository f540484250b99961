//! Hash-consed objects and structural arrows of one context.
//!
//! Objects are built from `A`, `B`, registered leaves, coproducts over `A`
//! and the bar objects `B ⊗_X U`; arrows are built from structure maps,
//! registered morphisms and the universal properties. Everything is
//! materialized lazily and cached, so nested cubes share their work.

use std::any::Any;
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use crate::cfcat::{bar_map, tensor_with_set, CfMorphism, CfObject, Context, Coproduct};
use crate::chain::{ChainComplex, ChainMap};
use crate::error::{Error, Result};
use crate::field::Field;

pub type NodeId = usize;
pub type ArrowId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Initial,
    Terminal,
    Leaf(usize),
    /// At least two components.
    Coprod(Vec<NodeId>),
    /// `B ⊗_X U` with `#U ≥ 1`.
    Bar(NodeId, usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Arrow {
    Id(NodeId),
    ToTerminal(NodeId),
    FromInitial(NodeId),
    Map(usize),
    Coprod(Vec<ArrowId>),
    Inject(NodeId, usize, ArrowId),
    Universal(NodeId, NodeId, Vec<ArrowId>),
    /// `b ∘ a`
    Compose(ArrowId, ArrowId),
    /// `B⊗_g U → B⊗_g V` for masks `U ⊆ V`.
    Bar(ArrowId, usize, usize),
}

pub const DEFAULT_CAP: usize = 20000;

struct Store<F: Field> {
    nodes: Vec<Node>,
    node_ids: HashMap<Node, NodeId>,
    arrows: Vec<(Arrow, NodeId, NodeId)>,
    arrow_ids: HashMap<Arrow, ArrowId>,
    leaves: Vec<Arc<CfObject<F>>>,
    maps: Vec<ChainMap<F>>,
    objects: HashMap<NodeId, Arc<CfObject<F>>>,
    coproducts: HashMap<NodeId, Arc<Coproduct<F>>>,
    matrices: HashMap<ArrowId, Arc<ChainMap<F>>>,
    keys: HashMap<String, usize>,
    values: HashMap<(usize, NodeId), Arc<ChainComplex<F>>>,
    fmaps: HashMap<(usize, ArrowId), Arc<ChainMap<F>>>,
    aux: HashMap<(usize, NodeId), Arc<dyn Any + Send + Sync>>,
}

pub struct Session<F: Field> {
    ctx: Arc<Context<F>>,
    store: RefCell<Store<F>>,
    /// Largest total dimension allowed for a single value or totalization.
    pub cap: usize,
}

impl<F: Field> Session<F> {
    pub fn new(ctx: &Arc<Context<F>>) -> Self {
        let s = Session {
            ctx: ctx.clone(),
            store: RefCell::new(Store {
                nodes: vec![],
                node_ids: HashMap::new(),
                arrows: vec![],
                arrow_ids: HashMap::new(),
                leaves: vec![],
                maps: vec![],
                objects: HashMap::new(),
                coproducts: HashMap::new(),
                matrices: HashMap::new(),
                keys: HashMap::new(),
                values: HashMap::new(),
                fmaps: HashMap::new(),
                aux: HashMap::new(),
            }),
            cap: DEFAULT_CAP,
        };
        s.intern_node(Node::Initial);
        s.intern_node(Node::Terminal);
        s
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn ctx(&self) -> &Arc<Context<F>> {
        &self.ctx
    }

    pub fn field(&self) -> F {
        self.ctx.field()
    }

    pub fn check_cap(&self, what: &str, dims: usize) -> Result<()> {
        if dims > self.cap {
            return Err(Error::TooLarge { what: what.to_string(), dims, cap: self.cap });
        }
        Ok(())
    }

    fn intern_node(&self, n: Node) -> NodeId {
        let mut st = self.store.borrow_mut();
        if let Some(&id) = st.node_ids.get(&n) {
            return id;
        }
        let id = st.nodes.len();
        st.nodes.push(n.clone());
        st.node_ids.insert(n, id);
        id
    }

    pub fn node(&self, id: NodeId) -> Node {
        self.store.borrow().nodes[id].clone()
    }

    pub fn initial(&self) -> NodeId {
        0
    }

    pub fn terminal(&self) -> NodeId {
        1
    }

    /// Leaves are identified by pointer.
    pub fn leaf(&self, x: &Arc<CfObject<F>>) -> NodeId {
        assert!(x.ctx().same(&self.ctx), "leaf from another context");
        let idx = {
            let mut st = self.store.borrow_mut();
            match st.leaves.iter().position(|l| Arc::ptr_eq(l, x)) {
                Some(i) => i,
                None => {
                    st.leaves.push(x.clone());
                    st.leaves.len() - 1
                }
            }
        };
        self.intern_node(Node::Leaf(idx))
    }

    /// Empty gives `A`, a single component is returned as is.
    pub fn coprod(&self, comps: &[NodeId]) -> NodeId {
        match comps.len() {
            0 => self.initial(),
            1 => comps[0],
            _ => self.intern_node(Node::Coprod(comps.to_vec())),
        }
    }

    pub fn components(&self, id: NodeId) -> Vec<NodeId> {
        match self.node(id) {
            Node::Coprod(c) => c,
            Node::Initial => vec![],
            _ => vec![id],
        }
    }

    pub fn bar(&self, x: NodeId, u: usize) -> NodeId {
        if u == 0 {
            x
        } else {
            self.intern_node(Node::Bar(x, u))
        }
    }

    pub fn object(&self, id: NodeId) -> Result<Arc<CfObject<F>>> {
        if let Some(o) = self.store.borrow().objects.get(&id) {
            return Ok(o.clone());
        }
        let obj = match self.node(id) {
            Node::Initial => self.ctx.initial(),
            Node::Terminal => self.ctx.terminal(),
            Node::Leaf(i) => self.store.borrow().leaves[i].clone(),
            Node::Coprod(_) => self.coproduct(id)?.object.clone(),
            Node::Bar(x, u) => {
                let xo = self.object(x)?;
                let o = tensor_with_set(&xo, (1usize << u) - 1);
                self.check_cap("bar object", o.x().total_dim())?;
                o
            }
        };
        self.store.borrow_mut().objects.insert(id, obj.clone());
        Ok(obj)
    }

    pub fn complex(&self, id: NodeId) -> Result<Arc<ChainComplex<F>>> {
        Ok(self.object(id)?.x().clone())
    }

    pub fn coproduct(&self, id: NodeId) -> Result<Arc<Coproduct<F>>> {
        if let Some(c) = self.store.borrow().coproducts.get(&id) {
            return Ok(c.clone());
        }
        let comps = match self.node(id) {
            Node::Coprod(c) => c,
            other => return Err(Error::Invalid(format!("{other:?} is not a coproduct node"))),
        };
        let objs: Vec<Arc<CfObject<F>>> = comps.iter().map(|&c| self.object(c)).collect::<Result<_>>()?;
        let total: usize = objs.iter().map(|o| o.x().total_dim()).sum();
        self.check_cap("coproduct", total)?;
        let cp = Arc::new(Coproduct::new(&self.ctx, &objs)?);
        let mut st = self.store.borrow_mut();
        st.objects.insert(id, cp.object.clone());
        st.coproducts.insert(id, cp.clone());
        Ok(cp)
    }

    fn intern_arrow(&self, a: Arrow, src: NodeId, tgt: NodeId) -> ArrowId {
        let mut st = self.store.borrow_mut();
        if let Some(&id) = st.arrow_ids.get(&a) {
            return id;
        }
        let id = st.arrows.len();
        st.arrows.push((a.clone(), src, tgt));
        st.arrow_ids.insert(a, id);
        id
    }

    pub fn arrow(&self, a: ArrowId) -> Arrow {
        self.store.borrow().arrows[a].0.clone()
    }

    pub fn src(&self, a: ArrowId) -> NodeId {
        self.store.borrow().arrows[a].1
    }

    pub fn tgt(&self, a: ArrowId) -> NodeId {
        self.store.borrow().arrows[a].2
    }

    pub fn is_id(&self, a: ArrowId) -> bool {
        matches!(self.arrow(a), Arrow::Id(_))
    }

    pub fn id(&self, x: NodeId) -> ArrowId {
        self.intern_arrow(Arrow::Id(x), x, x)
    }

    pub fn to_terminal(&self, x: NodeId) -> ArrowId {
        if x == self.terminal() {
            return self.id(x);
        }
        self.intern_arrow(Arrow::ToTerminal(x), x, self.terminal())
    }

    pub fn from_initial(&self, x: NodeId) -> ArrowId {
        if x == self.initial() {
            return self.id(x);
        }
        self.intern_arrow(Arrow::FromInitial(x), self.initial(), x)
    }

    /// Registers a morphism between two existing nodes whose objects carry
    /// exactly the given complexes.
    pub fn register_between(&self, src: NodeId, tgt: NodeId, g: ChainMap<F>) -> Result<ArrowId> {
        let (so, to) = (self.object(src)?, self.object(tgt)?);
        let m = CfMorphism::new(so, to, g)?;
        let idx = {
            let mut st = self.store.borrow_mut();
            st.maps.push(m.g);
            st.maps.len() - 1
        };
        Ok(self.intern_arrow(Arrow::Map(idx), src, tgt))
    }

    pub fn register(&self, m: &CfMorphism<F>) -> Result<ArrowId> {
        let (s, t) = (self.leaf(&m.source), self.leaf(&m.target));
        self.register_between(s, t, m.g.clone())
    }

    /// `b ∘ a`
    pub fn compose(&self, a: ArrowId, b: ArrowId) -> ArrowId {
        assert_eq!(self.tgt(a), self.src(b), "composable arrows");
        if self.is_id(a) {
            return b;
        }
        if self.is_id(b) {
            return a;
        }
        self.intern_arrow(Arrow::Compose(a, b), self.src(a), self.tgt(b))
    }

    pub fn compose_all(&self, arrows: &[ArrowId]) -> ArrowId {
        let mut acc = arrows[0];
        for &b in &arrows[1..] {
            acc = self.compose(acc, b);
        }
        acc
    }

    /// `⨿ a_i : ⨿ X_i → ⨿ Y_i`.
    pub fn coprod_map(&self, children: &[ArrowId]) -> ArrowId {
        let srcs: Vec<NodeId> = children.iter().map(|&a| self.src(a)).collect();
        let tgts: Vec<NodeId> = children.iter().map(|&a| self.tgt(a)).collect();
        let (s, t) = (self.coprod(&srcs), self.coprod(&tgts));
        match children.len() {
            0 => self.id(s),
            1 => children[0],
            _ if children.iter().all(|&a| self.is_id(a)) => self.id(s),
            _ => self.intern_arrow(Arrow::Coprod(children.to_vec()), s, t),
        }
    }

    /// `ι_i ∘ a` into the coproduct node `tgt`.
    pub fn inject(&self, tgt: NodeId, i: usize, a: ArrowId) -> ArrowId {
        match self.node(tgt) {
            Node::Coprod(c) => {
                assert_eq!(c[i], self.tgt(a), "injection into the matching component");
                self.intern_arrow(Arrow::Inject(tgt, i, a), self.src(a), tgt)
            }
            _ => {
                assert!(i == 0 && self.tgt(a) == tgt, "injection into a single component");
                a
            }
        }
    }

    /// The map out of the coproduct node `src` restricting to `children[i]`.
    pub fn universal(&self, src: NodeId, tgt: NodeId, children: &[ArrowId]) -> ArrowId {
        for &c in children {
            assert_eq!(self.tgt(c), tgt, "universal map target");
        }
        match self.node(src) {
            Node::Coprod(c) => {
                assert_eq!(c.len(), children.len());
                for (k, &a) in children.iter().enumerate() {
                    assert_eq!(self.src(a), c[k], "universal map source");
                }
                self.intern_arrow(Arrow::Universal(src, tgt, children.to_vec()), src, tgt)
            }
            Node::Initial if children.is_empty() => self.from_initial(tgt),
            _ => {
                assert_eq!(children.len(), 1);
                children[0]
            }
        }
    }

    /// `B⊗_g U → B⊗_g V` for `g = a`, masks `U ⊆ V`.
    pub fn bar_map(&self, a: ArrowId, u: usize, v: usize) -> ArrowId {
        assert_eq!(u & !v, 0, "U ⊆ V");
        let s = self.bar(self.src(a), u.count_ones() as usize);
        let t = self.bar(self.tgt(a), v.count_ones() as usize);
        if u == v && (u == 0 || self.is_id(a)) {
            return if u == 0 { a } else { self.id(s) };
        }
        self.intern_arrow(Arrow::Bar(a, u, v), s, t)
    }

    /// The chain map underlying an arrow.
    pub fn matrix(&self, a: ArrowId) -> Result<Arc<ChainMap<F>>> {
        if let Some(m) = self.store.borrow().matrices.get(&a) {
            return Ok(m.clone());
        }
        let (arrow, s, t) = self.store.borrow().arrows[a].clone();
        let m = match arrow {
            Arrow::Id(x) => ChainMap::identity(self.complex(x)?),
            Arrow::ToTerminal(x) => self.object(x)?.proj().clone(),
            Arrow::FromInitial(x) => self.object(x)?.incl().clone(),
            Arrow::Map(i) => {
                let g = self.store.borrow().maps[i].clone();
                g.rebase(self.complex(s)?, self.complex(t)?)
            }
            Arrow::Coprod(children) => {
                let tc = self.coproduct(t)?;
                let maps: Vec<ChainMap<F>> = children
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| Ok(self.matrix(c)?.then(&tc.inclusions[k])))
                    .collect::<Result<_>>()?;
                let refs: Vec<&ChainMap<F>> = maps.iter().collect();
                self.coproduct(s)?.universal(tc.object.x().clone(), &refs)
            }
            Arrow::Inject(tgt, i, c) => {
                let tc = self.coproduct(tgt)?;
                self.matrix(c)?.then(&tc.inclusions[i])
            }
            Arrow::Universal(src, tgt, children) => {
                let maps: Vec<Arc<ChainMap<F>>> = children.iter().map(|&c| self.matrix(c)).collect::<Result<_>>()?;
                let refs: Vec<&ChainMap<F>> = maps.iter().map(|m| m.as_ref()).collect();
                self.coproduct(src)?.universal(self.complex(tgt)?, &refs)
            }
            Arrow::Compose(x, y) => self.matrix(x)?.then(self.matrix(y)?.as_ref()),
            Arrow::Bar(g, u, v) => {
                let (x, y) = (self.object(self.src(g))?, self.object(self.tgt(g))?);
                let (so, to) = (self.object(s)?, self.object(t)?);
                bar_map(&x, &y, &so, &to, u, v, self.matrix(g)?.as_ref())
            }
        };
        let m = Arc::new(m);
        self.store.borrow_mut().matrices.insert(a, m.clone());
        Ok(m)
    }

    pub fn morphism(&self, a: ArrowId) -> Result<CfMorphism<F>> {
        let g = self.matrix(a)?.as_ref().clone();
        CfMorphism::new(self.object(self.src(a))?, self.object(self.tgt(a))?, g)
    }

    /// Interns a functor description, returning a cache key.
    pub fn key(&self, repr: String) -> usize {
        let mut st = self.store.borrow_mut();
        let n = st.keys.len();
        *st.keys.entry(repr).or_insert(n)
    }

    pub fn cached_value(&self, key: usize, x: NodeId) -> Option<Arc<ChainComplex<F>>> {
        self.store.borrow().values.get(&(key, x)).cloned()
    }

    pub fn store_value(&self, key: usize, x: NodeId, v: Arc<ChainComplex<F>>) {
        self.store.borrow_mut().values.insert((key, x), v);
    }

    pub fn cached_map(&self, key: usize, a: ArrowId) -> Option<Arc<ChainMap<F>>> {
        self.store.borrow().fmaps.get(&(key, a)).cloned()
    }

    pub fn store_map(&self, key: usize, a: ArrowId, m: Arc<ChainMap<F>>) {
        self.store.borrow_mut().fmaps.insert((key, a), m);
    }

    /// Side data attached to a functor value, such as a quotient presentation.
    pub fn cached_aux<T: Send + Sync + 'static>(&self, key: usize, x: NodeId) -> Option<Arc<T>> {
        let a = self.store.borrow().aux.get(&(key, x)).cloned()?;
        a.downcast::<T>().ok()
    }

    pub fn store_aux<T: Send + Sync + 'static>(&self, key: usize, x: NodeId, v: Arc<T>) {
        self.store.borrow_mut().aux.insert((key, x), v);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::random::Gen;

    #[test]
    fn hash_consing_and_fold() {
        let f = PrimeField::default();
        let mut g = Gen::new(f, 11);
        let ctx = g.context(true);
        let x = g.object(&ctx);
        let s = Session::new(&ctx);
        let xn = s.leaf(&x);
        assert_eq!(s.leaf(&x), xn);
        let c = s.coprod(&[xn, xn, xn]);
        assert_eq!(c, s.coprod(&[xn, xn, xn]));
        let id = s.id(xn);
        let fold = s.universal(c, xn, &[id, id, id]);
        for i in 0..3 {
            let inj = s.inject(c, i, id);
            let m = s.matrix(s.compose(inj, fold)).unwrap();
            assert!(m.is_identity());
        }
        let to_b = s.to_terminal(c);
        let via = s.compose(fold, s.to_terminal(xn));
        assert_eq!(*s.matrix(to_b).unwrap(), *s.matrix(via).unwrap());
    }

    #[test]
    fn bar_maps_compose() {
        let f = PrimeField::default();
        let mut g = Gen::new(f, 5);
        let ctx = g.context(true);
        let x = g.object(&ctx);
        let m = g.morphism_from(&x);
        let s = Session::new(&ctx);
        let a = s.register(&m).unwrap();
        let one = s.bar_map(a, 0b01, 0b11);
        let two = s.bar_map(s.id(s.tgt(a)), 0b11, 0b111);
        let direct = s.bar_map(a, 0b01, 0b111);
        let lhs = s.matrix(s.compose(one, two)).unwrap();
        assert_eq!(*lhs, *s.matrix(direct).unwrap());
        s.morphism(direct).unwrap();
    }
}
